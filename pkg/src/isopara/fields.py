"""Canonical isoparametric fields and pointwise differential operators.

A plane field is u(x) = U(q . (x - x0)); a cylinder field is
u(x) = U_k(|R0 (x - x_star)|) with R0 a rank-k symmetric projection.  Both
carry analytic jets via the chain rule; arbitrary black boxes (callables or
sampled grids) get finite-difference jets instead.
"""
import json
from dataclasses import dataclass, field as dc_field

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from .errors import (
    AxisTooClose,
    CriticalPoint,
    InvalidSpec,
    RankOutOfRange,
    StepTooSmall,
)
from .profile import Profile, TransformParams, profile_from_dict, profile_to_dict
from .spectral import Projection

EPS_GRAD = 1e-12
PROJ_TOL = 1e-10


def random_projection(n, k, seed):
    """Seeded random rank-k symmetric projection via Gram-Schmidt on
    Gaussian columns."""
    if not 0 <= k <= n:
        raise RankOutOfRange(f"rank {k} outside 0..{n}")
    if k == 0:
        return Projection(matrix=np.zeros((n, n)))
    if k == n:
        return Projection(matrix=np.eye(n))
    rng = np.random.default_rng(seed)
    Q = np.empty((n, k))
    for j in range(k):
        while True:
            v = rng.standard_normal(n)
            for i in range(j):
                v -= (Q[:, i] @ v) * Q[:, i]
            nv = np.linalg.norm(v)
            if nv > 1e-8:
                break
        # second pass for orthogonality at machine precision
        for i in range(j):
            v -= (Q[:, i] @ v) * Q[:, i]
        Q[:, j] = v / np.linalg.norm(v)
    R = Q @ Q.T
    return Projection(matrix=0.5 * (R + R.T))


@dataclass(frozen=True)
class PlaneField:
    q: np.ndarray
    x0: np.ndarray
    profile: Profile

    kind = "plane"

    @property
    def n(self):
        return len(self.q)


@dataclass(frozen=True)
class CylinderField:
    R0: np.ndarray
    x_star: np.ndarray
    k: int
    C1: float
    profile: Profile
    eps_axis: float = dc_field(default=0.0)  # 0 -> scale-based default

    kind = "cylinder"

    @property
    def n(self):
        return len(self.x_star)

    @property
    def c1(self):
        return self.C1 / (self.k - 1)

    @property
    def shift(self):
        """Radius of the base level set, (k-1)/C1."""
        return (self.k - 1) / self.C1

    @property
    def axis_margin(self):
        if self.eps_axis > 0:
            return self.eps_axis
        return 1e-6 * max(1.0, float(np.linalg.norm(self.x_star)), self.shift)

    @property
    def params(self):
        return TransformParams.cylinder(self.k, self.C1)


@dataclass(frozen=True)
class Jet:
    """Value, gradient (row) and Hessian of a scalar field at a point."""

    x: np.ndarray
    u: float
    grad: np.ndarray
    hess: np.ndarray

    def negated(self):
        return Jet(x=self.x, u=-self.u, grad=-self.grad, hess=-self.hess)


@dataclass(frozen=True)
class Operators:
    """Pointwise first/second order operators of a scalar field."""

    gradnorm: float
    laplacian: float
    ninf: float  # normalized infinity-Laplacian
    onelap: float  # 1-Laplacian = mean curvature of the level set
    hess_v: np.ndarray  # Hessian of the unit-gradient reparametrization


def make_plane(q, x0, profile):
    q = np.asarray(q, dtype=float)
    x0 = np.asarray(x0, dtype=float)
    if q.ndim != 1 or q.shape != x0.shape:
        raise InvalidSpec("q and x0 must be 1-d vectors of equal length")
    if abs(np.linalg.norm(q) - 1.0) > 1e-12:
        raise InvalidSpec("q must have unit length (within 1e-12)")
    if not isinstance(profile, Profile):
        raise InvalidSpec("profile must be a Profile")
    return PlaneField(q=q, x0=x0, profile=profile)


def make_cylinder(R0, x_star, k, C1, profile, eps_axis=0.0):
    R0 = np.asarray(R0, dtype=float)
    x_star = np.asarray(x_star, dtype=float)
    n = len(x_star)
    if R0.shape != (n, n):
        raise InvalidSpec("R0 must be n x n with n = len(x_star)")
    if np.abs(R0 - R0.T).max() > PROJ_TOL:
        raise InvalidSpec("R0 must be symmetric")
    if np.linalg.norm(R0 @ R0 - R0) > PROJ_TOL:
        raise InvalidSpec("R0 must be idempotent")
    k = int(k)
    if abs(np.trace(R0) - k) > PROJ_TOL:
        raise InvalidSpec("trace(R0) must equal k")
    if not 2 <= k <= n:
        raise InvalidSpec("cylinder requires 2 <= k <= n")
    if not C1 > 0:
        raise InvalidSpec("cylinder requires C1 > 0")
    if not isinstance(profile, Profile):
        raise InvalidSpec("profile must be a Profile")
    return CylinderField(R0=0.5 * (R0 + R0.T), x_star=x_star, k=k,
                         C1=float(C1), profile=profile, eps_axis=float(eps_axis))


def make_field(spec):
    """Build a canonical field from its JSON-style dict."""
    kind = spec.get("kind")
    prof = spec["profile"]
    if isinstance(prof, dict):
        prof = profile_from_dict(prof)
    if kind == "plane":
        return make_plane(spec["q"], spec["x0"], prof)
    if kind == "cylinder":
        return make_cylinder(spec["R0"], spec["x_star"], spec["k"], spec["C1"],
                             prof, eps_axis=spec.get("eps_axis", 0.0))
    raise InvalidSpec(f"unknown field kind {kind!r}")


def field_to_dict(fld):
    if fld.kind == "plane":
        return {
            "kind": "plane",
            "n": fld.n,
            "q": fld.q.tolist(),
            "x0": fld.x0.tolist(),
            "profile": profile_to_dict(fld.profile),
        }
    return {
        "kind": "cylinder",
        "n": fld.n,
        "R0": fld.R0.tolist(),
        "x_star": fld.x_star.tolist(),
        "k": fld.k,
        "C1": fld.C1,
        "profile": profile_to_dict(fld.profile),
    }


def evaluate(fld, X):
    """Evaluate a canonical field on points X of shape (..., n)."""
    X = np.asarray(X, dtype=float)
    if fld.kind == "plane":
        s = (X - fld.x0) @ fld.q
        return fld.profile.U(s)
    w = (X - fld.x_star) @ fld.R0
    r = np.linalg.norm(w, axis=-1)
    if np.any(r <= fld.axis_margin):
        raise AxisTooClose("point within the axis exclusion margin")
    return fld.profile.U(r - fld.shift)


def as_callable(fld):
    """Black-box view of a canonical field (batched callable)."""
    return lambda X: evaluate(fld, X)


def analytic_jet(fld, x):
    x = np.asarray(x, dtype=float)
    if fld.kind == "plane":
        s = float((x - fld.x0) @ fld.q)
        u = fld.profile.U(s)
        fv = fld.profile.f(u)
        fp = fld.profile.fprime(u)
        grad = fv * fld.q
        hess = fp * fv * np.outer(fld.q, fld.q)
        return Jet(x=x, u=u, grad=grad, hess=hess)
    w = fld.R0 @ (x - fld.x_star)
    r = float(np.linalg.norm(w))
    if r <= fld.axis_margin:
        raise AxisTooClose("point within the axis exclusion margin")
    what = w / r
    u = fld.profile.U(r - fld.shift)
    fv = fld.profile.f(u)
    fp = fld.profile.fprime(u)
    grad = fv * what
    hess = fp * fv * np.outer(what, what) + fv * (fld.R0 - np.outer(what, what)) / r
    return Jet(x=x, u=u, grad=grad, hess=0.5 * (hess + hess.T))


def fd_jet(u_call, x, h):
    """Central O(h^2) finite-difference jet of a black-box field.

    The black box must accept batched points of shape (m, n).
    """
    x = np.asarray(x, dtype=float)
    n = len(x)
    if h <= 0:
        raise ValueError("h must be positive")
    if h < 1e3 * np.finfo(float).eps * np.linalg.norm(x):
        raise StepTooSmall(f"h={h} below the roundoff floor at |x|={np.linalg.norm(x)}")
    pts = [x]
    for i in range(n):
        e = np.zeros(n)
        e[i] = h
        pts.append(x + e)
        pts.append(x - e)
    pairs = []
    for i in range(n):
        for j in range(i + 1, n):
            ei = np.zeros(n)
            ei[i] = h
            ej = np.zeros(n)
            ej[j] = h
            pts.extend([x + ei + ej, x + ei - ej, x - ei + ej, x - ei - ej])
            pairs.append((i, j))
    vals = np.asarray(u_call(np.array(pts)), dtype=float)
    u0 = vals[0]
    grad = np.empty(n)
    hess = np.empty((n, n))
    for i in range(n):
        up, um = vals[1 + 2 * i], vals[2 + 2 * i]
        grad[i] = (up - um) / (2 * h)
        hess[i, i] = (up - 2 * u0 + um) / h**2
    base = 1 + 2 * n
    for idx, (i, j) in enumerate(pairs):
        vpp, vpm, vmp, vmm = vals[base + 4 * idx: base + 4 * idx + 4]
        hess[i, j] = hess[j, i] = (vpp - vpm - vmp + vmm) / (4 * h**2)
    return Jet(x=x, u=float(u0), grad=grad, hess=hess)


def jet(fld_or_callable, x, mode="analytic", h=None):
    """Differential jet of a field: exact chain rule for canonical fields,
    central differences for black boxes."""
    x = np.asarray(x, dtype=float)
    canonical = isinstance(fld_or_callable, (PlaneField, CylinderField))
    if mode == "analytic":
        if not canonical:
            raise ValueError("analytic jets need a canonical field")
        return analytic_jet(fld_or_callable, x)
    if mode != "fd":
        raise ValueError(f"unknown jet mode {mode!r}")
    if h is None:
        h = 1e-4 * max(1.0, float(np.linalg.norm(x)))
    u_call = as_callable(fld_or_callable) if canonical else fld_or_callable
    return fd_jet(u_call, x, h)


def operators(j, eps_grad=EPS_GRAD):
    """The five pointwise operators |grad u|, Lap u, normalized
    infinity-Laplacian, 1-Laplacian and the unit-gradient Hessian."""
    g = j.grad
    gn = float(np.linalg.norm(g))
    if gn <= eps_grad:
        raise CriticalPoint(f"|grad u| = {gn:.3e} <= {eps_grad:.1e}")
    lap = float(np.trace(j.hess))
    ninf = float(g @ j.hess @ g) / gn**2
    onelap = (lap - ninf) / gn
    nhat = g / gn
    hess_v = (j.hess - ninf * np.outer(nhat, nhat)) / gn
    return Operators(gradnorm=gn, laplacian=lap, ninf=ninf, onelap=onelap,
                     hess_v=0.5 * (hess_v + hess_v.T))


def v_jet(fld, x):
    """Value, gradient and Hessian of the unit-gradient reparametrization
    v = F(u) of a canonical field."""
    x = np.asarray(x, dtype=float)
    if fld.kind == "plane":
        v = float((x - fld.x0) @ fld.q)
        return v, fld.q.copy(), np.zeros((fld.n, fld.n))
    w = fld.R0 @ (x - fld.x_star)
    r = float(np.linalg.norm(w))
    if r <= fld.axis_margin:
        raise AxisTooClose("point within the axis exclusion margin")
    what = w / r
    hess = (fld.R0 - np.outer(what, what)) / r
    return r - fld.shift, what, 0.5 * (hess + hess.T)


def sample_points(fld, count, rng, kernel_scale=0.5):
    """Random admissible points with u-values inside the profile's safe
    band (and F_k > 0 for cylinders)."""
    prof = fld.profile
    t_lo, t_hi = prof.safe_range()
    if fld.kind == "cylinder":
        # keep the radial coordinate comfortably positive
        s_floor = -0.9 * fld.shift
        s_lo = max(prof.F(t_lo), s_floor)
        s_hi = max(prof.F(t_hi), s_lo + 1e-6)
    else:
        s_lo, s_hi = prof.F(t_lo), prof.F(t_hi)
    s = rng.uniform(s_lo, s_hi, size=count)
    n = fld.n
    if fld.kind == "plane":
        orth = rng.standard_normal((count, n))
        orth -= np.outer(orth @ fld.q, fld.q)
        return fld.x0 + s[:, None] * fld.q + orth
    r = fld.shift + s
    dirs = rng.standard_normal((count, n)) @ fld.R0
    norms = np.linalg.norm(dirs, axis=1, keepdims=True)
    norms[norms < 1e-12] = 1.0
    dirs /= norms
    kern = kernel_scale * (rng.standard_normal((count, n)) @ (np.eye(n) - fld.R0))
    return fld.x_star + r[:, None] * dirs + kern


class GridField:
    """Black-box field from a sampled lattice, interpolated with cubic
    kernels.

    File format: a JSON header line {"shape": [...], "origin": [...],
    "spacing": [...]} followed by CSV rows x_1,...,x_n,u.
    """

    def __init__(self, origin, spacing, shape, values):
        self.origin = np.asarray(origin, dtype=float)
        self.spacing = np.asarray(spacing, dtype=float)
        self.shape = tuple(int(m) for m in shape)
        values = np.asarray(values, dtype=float).reshape(self.shape)
        axes = [self.origin[i] + self.spacing[i] * np.arange(self.shape[i])
                for i in range(len(self.shape))]
        self._interp = RegularGridInterpolator(axes, values, method="cubic")

    @property
    def n(self):
        return len(self.shape)

    def __call__(self, X):
        X = np.asarray(X, dtype=float)
        return self._interp(X)

    @classmethod
    def read(cls, path):
        with open(path) as fh:
            header = json.loads(fh.readline())
            data = np.loadtxt(fh, delimiter=",", ndmin=2)
        shape = header["shape"]
        n = len(shape)
        coords = data[:, :n]
        vals = data[:, n]
        origin = np.asarray(header["origin"], dtype=float)
        spacing = np.asarray(header["spacing"], dtype=float)
        # order rows by lattice index regardless of file order
        idx = np.rint((coords - origin) / spacing).astype(int)
        flat = np.ravel_multi_index(idx.T, shape)
        values = np.empty(int(np.prod(shape)))
        values[flat] = vals
        return cls(origin, spacing, shape, values)

    @classmethod
    def write(cls, path, origin, spacing, shape, u_call):
        origin = np.asarray(origin, dtype=float)
        spacing = np.asarray(spacing, dtype=float)
        axes = [origin[i] + spacing[i] * np.arange(shape[i])
                for i in range(len(shape))]
        mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
        pts = mesh.reshape(-1, len(shape))
        vals = np.asarray(u_call(pts), dtype=float)
        with open(path, "w") as fh:
            fh.write(json.dumps({"shape": list(shape),
                                 "origin": origin.tolist(),
                                 "spacing": spacing.tolist()}) + "\n")
            for p, v in zip(pts, vals):
                fh.write(",".join(repr(float(c)) for c in p)
                         + "," + repr(float(v)) + "\n")
