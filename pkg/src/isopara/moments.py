"""Power-sum moments and their Newton inversion.

The forward map sends distinct values y_1..y_m with integer weights d_i to
the moment vector C_k = sum_i d_i y_i^k.  Its Jacobian factors through a
Vandermonde matrix, giving the closed determinant m! d_1...d_m prod (y_j-y_i),
which is nonzero exactly when the y_i are distinct.  Inversion is damped
Newton from a caller-supplied initial guess.
"""
from dataclasses import dataclass

import numpy as np

from .errors import NoConvergence, SingularJacobian

COLLISION_GAP = 1e-12


@dataclass(frozen=True)
class MomentSystem:
    """Moment vector C_1..C_m with the (known) multiplicities d_1..d_m."""

    d: np.ndarray
    C: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "d", np.asarray(self.d, dtype=int))
        object.__setattr__(self, "C", np.asarray(self.C, dtype=float))
        if self.m < 1:
            raise ValueError("need at least one moment")
        if len(self.d) != self.m:
            raise ValueError("d and C must have equal length")
        if np.any(self.d < 1):
            raise ValueError("multiplicities must be positive")
        if not np.all(np.isfinite(self.C)):
            raise ValueError("moments must be finite")

    @property
    def m(self):
        return len(self.C)


def power_sums(kappas, d, m):
    """Moment vector (C_1,...,C_m) with C_k = sum_i d_i kappas_i^k."""
    kappas = np.asarray(kappas, dtype=float)
    d = np.asarray(d, dtype=float)
    if kappas.shape != d.shape:
        raise ValueError("kappas and d must have equal length")
    if m < 1:
        raise ValueError("m must be >= 1")
    powers = kappas[None, :] ** np.arange(1, m + 1)[:, None]
    return powers @ d


def vandermonde_jacobian(y, d):
    """Jacobian of the power-sum map and its closed-form determinant.

    Returns (J, det) with J[k-1, j] = k d_j y_j^(k-1) and
    det = m! d_1...d_m prod_{i<j} (y_j - y_i).
    """
    y = np.asarray(y, dtype=float)
    d = np.asarray(d, dtype=float)
    if y.shape != d.shape:
        raise ValueError("y and d must have equal length")
    m = len(y)
    k = np.arange(1, m + 1)[:, None]
    J = k * d[None, :] * y[None, :] ** (k - 1)
    det = float(np.prod(k)) * float(np.prod(d))
    for i in range(m):
        for j in range(i + 1, m):
            det *= y[j] - y[i]
    return J, det


def invert_moments(sys, y0, tol=1e-12, max_iter=100):
    """Recover the distinct values from their moments by damped Newton.

    Solves power_sums(y, d, m) = C starting from the distinct guess y0;
    the step is halved while the residual norm does not decrease.  The
    result is sorted ascending.
    """
    y = np.array(y0, dtype=float)
    d = sys.d.astype(float)
    m = sys.m
    if len(y) != m:
        raise ValueError("initial guess has wrong length")
    if tol <= 0:
        raise ValueError("tol must be positive")

    def residual(yv):
        return power_sums(yv, d, m) - sys.C

    r = residual(y)
    for _ in range(max_iter):
        if np.linalg.norm(r) <= tol:
            ys = np.sort(y)
            if m > 1 and np.min(np.diff(ys)) < COLLISION_GAP:
                raise SingularJacobian("converged to a collided spectrum")
            return ys
        if m > 1:
            gaps = np.abs(y[:, None] - y[None, :])[~np.eye(m, dtype=bool)]
            if gaps.min() < COLLISION_GAP:
                raise SingularJacobian(
                    f"Newton iterates collided (gap {gaps.min():.3e})"
                )
        J, _ = vandermonde_jacobian(y, d)
        step = np.linalg.solve(J, r)
        # half-step damping on residual increase
        lam = 1.0
        r_norm = np.linalg.norm(r)
        for _ in range(30):
            y_new = y - lam * step
            r_new = residual(y_new)
            if np.linalg.norm(r_new) < r_norm:
                break
            lam *= 0.5
        y, r = y_new, r_new
    raise NoConvergence(f"moment inversion did not converge in {max_iter} iterations",
                       iterations=max_iter)
