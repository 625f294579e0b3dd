"""Symmetric eigenstructure with tolerance-based eigenvalue grouping.

Provides clustered eigendecompositions, eigenprojections via the Frobenius
covariant product, pseudo-inverses, and the Cartan fundamental sum used by
the classifier's rejection diagnostics.
"""
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import DegenerateSpectrum, NoConvergence, NonFinite

DEFAULT_GROUP_TOL = 1e-6
_MAX_SWEEPS = 64


def check_symmetric(A):
    """Validate and symmetrize a dense matrix; returns a float ndarray."""
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise NonFinite("matrix has non-finite entries")
    return 0.5 * (A + A.T)


@dataclass(frozen=True)
class Projection:
    """Symmetric projection matrix with its rank."""

    matrix: np.ndarray

    @property
    def n(self):
        return self.matrix.shape[0]

    @property
    def rank(self):
        return int(round(np.trace(self.matrix)))


@dataclass(frozen=True)
class SpectralDecomp:
    """Distinct eigenvalues, multiplicities and eigenprojections of a
    symmetric matrix, with repeated eigenvalues merged by a relative
    grouping tolerance."""

    kappas: np.ndarray  # strictly increasing, length s
    mults: np.ndarray  # positive ints summing to n
    projections: tuple  # s symmetric n x n ndarrays
    tol_proj: float = field(default=0.0)

    @property
    def n(self):
        return int(self.mults.sum())

    @property
    def s(self):
        return len(self.kappas)

    def reconstruct(self):
        out = np.zeros((self.n, self.n))
        for kappa, P in zip(self.kappas, self.projections):
            out += kappa * P
        return out


def sym_eig(A, group_tol=DEFAULT_GROUP_TOL):
    """Clustered eigendecomposition of a symmetric matrix.

    Eigenvalues whose gaps are <= group_tol * max(1, spectral radius) are
    merged into one cluster; the cluster projection is the symmetrized sum
    of its eigenvector outer products.
    """
    A = check_symmetric(A)
    if group_tol <= 0:
        raise ValueError("group_tol must be positive")
    n = A.shape[0]
    w, V, sweeps, ok = _kernels.jacobi_eigh(A, _MAX_SWEEPS, 1e-15)
    if not ok:
        raise NoConvergence(
            f"Jacobi eigensolver did not converge in {sweeps} sweeps",
            iterations=sweeps,
        )
    order = np.argsort(w, kind="stable")
    w = w[order]
    V = V[:, order]
    rho = float(np.abs(w).max()) if n else 0.0
    merge = group_tol * max(1.0, rho)

    kappas = []
    mults = []
    projections = []
    start = 0
    for i in range(1, n + 1):
        if i == n or w[i] - w[i - 1] > merge:
            block = V[:, start:i]
            P = block @ block.T
            P = 0.5 * (P + P.T)
            kappas.append(float(w[start:i].mean()))
            mults.append(i - start)
            projections.append(P)
            start = i
    tol_proj = 100 * np.finfo(float).eps * n + group_tol
    return SpectralDecomp(
        kappas=np.array(kappas),
        mults=np.array(mults, dtype=int),
        projections=tuple(projections),
        tol_proj=tol_proj,
    )


def frobenius_covariant(A, kappas, i, gap_tol=DEFAULT_GROUP_TOL):
    """Eigenprojection P_i = prod_{l != i} (A - kappa_l I)/(kappa_i - kappa_l).

    `kappas` must be the full distinct spectrum of A.  The empty product
    (single eigenvalue) returns the identity.
    """
    A = check_symmetric(A)
    kappas = np.asarray(kappas, dtype=float)
    s = len(kappas)
    if not 0 <= i < s:
        raise IndexError(f"eigenvalue index {i} out of range for s={s}")
    n = A.shape[0]
    if s > 1:
        gaps = np.abs(kappas[:, None] - kappas[None, :])
        min_gap = gaps[~np.eye(s, dtype=bool)].min()
        scale = max(1.0, float(np.abs(kappas).max()))
        if min_gap < gap_tol * scale:
            raise DegenerateSpectrum(
                f"minimal eigenvalue gap {min_gap:.3e} below {gap_tol:.1e} * {scale:.3e}"
            )
    P = np.eye(n)
    for l in range(s):
        if l != i:
            P = P @ (A - kappas[l] * np.eye(n)) / (kappas[i] - kappas[l])
    return Projection(matrix=0.5 * (P + P.T))


def pseudo_inverse(dec, i, gap_tol=1e-12):
    """Pseudo-inverse sum_{k != i} P_k / (kappa_i - kappa_k).

    Satisfies (kappa_i I - A) H_i = I - P_i.  The empty sum (s = 1)
    is the zero matrix.
    """
    s = dec.s
    if not 0 <= i < s:
        raise IndexError(f"eigenvalue index {i} out of range for s={s}")
    out = np.zeros((dec.n, dec.n))
    for k in range(s):
        if k == i:
            continue
        gap = dec.kappas[i] - dec.kappas[k]
        if abs(gap) < gap_tol:
            raise DegenerateSpectrum(f"eigenvalue gap {gap:.3e} below {gap_tol:.1e}")
        out += dec.projections[k] / gap
    return out


def cartan_terms(kappas, mults, i):
    """The factors kappa_j/(kappa_i - kappa_j) over nonzero kappa_j, j != i."""
    kappas = np.asarray(kappas, dtype=float)
    mults = np.asarray(mults, dtype=int)
    terms = []
    for j in range(len(kappas)):
        if j == i or kappas[j] == 0.0:
            continue
        terms.append(kappas[j] / (kappas[i] - kappas[j]))
    return np.array(terms)


def cartan_sum(kappas, mults, i):
    """Cartan's fundamental sum  sum_{j != i} d_j kappa_i kappa_j/(kappa_i - kappa_j).

    A zero eigenvalue in the list contributes exactly 0.  `i` must index a
    nonzero eigenvalue.
    """
    kappas = np.asarray(kappas, dtype=float)
    mults = np.asarray(mults, dtype=int)
    if len(kappas) != len(mults):
        raise ValueError("kappas and mults must have equal length")
    if kappas[i] == 0.0:
        raise ValueError("i must index a nonzero eigenvalue")
    diffs = np.abs(kappas[:, None] - kappas[None, :])
    s = len(kappas)
    if s > 1 and diffs[~np.eye(s, dtype=bool)].min() == 0.0:
        raise ValueError("eigenvalues must be distinct")
    total = 0.0
    for j in range(s):
        if j == i or kappas[j] == 0.0:
            continue
        total += mults[j] * kappas[i] * kappas[j] / (kappas[i] - kappas[j])
    return total
