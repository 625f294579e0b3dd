"""One-variable profile calculus.

A profile is the positive function f with |grad u| = f(u), carried together
with its base value C0 and open interval of definition.  This module supplies
the arclength coordinate F(t) = int_C0^t ds/f(s), its inverse U, the shifted
cylinder coordinate F_k = (k-1)/C1 + F, the constitutive g induced by f, the
harmonizing transform G (solving G'' f^2 + G' g = 0) and the unit-gradient
harmonizer built from the product integrand prod (1 + c_i tau)^(-d_i).

Elementary families (constant, affine, power) carry closed-form F and U;
tabulated profiles interpolate f with a monotone cubic and integrate
numerically.
"""
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq

from .errors import NonPositiveFk, OutOfDomain, OutOfRange, PoleCrossed
from .numerics import CachedAntiderivative, gauss_panel, gauss_quad, invert_increasing


@dataclass(frozen=True)
class TransformParams:
    """Plane/cylinder selector with the base 1-Laplacian C1.

    A plane transform has C1 = 0; a cylinder transform needs C1 > 0 and a
    curved dimension 2 <= k.
    """

    kind: str  # "plane" | "cylinder"
    k: int | None = None
    C1: float = 0.0

    def __post_init__(self):
        if self.kind == "plane":
            if self.C1 != 0.0:
                raise ValueError("plane transform requires C1 = 0")
        elif self.kind == "cylinder":
            if self.k is None or self.k < 2:
                raise ValueError("cylinder transform requires k >= 2")
            if not self.C1 > 0.0:
                raise ValueError("cylinder transform requires C1 > 0")
        else:
            raise ValueError(f"unknown transform kind {self.kind!r}")

    @classmethod
    def plane(cls):
        return cls(kind="plane")

    @classmethod
    def cylinder(cls, k, C1):
        return cls(kind="cylinder", k=int(k), C1=float(C1))

    @property
    def shift(self):
        """The additive offset (k-1)/C1 turning F into F_k (0 for planes)."""
        if self.kind == "plane":
            return 0.0
        return (self.k - 1) / self.C1

    @property
    def c1(self):
        """Base principal curvature C1/(k-1)."""
        if self.kind == "plane":
            return 0.0
        return self.C1 / (self.k - 1)


def _vectorized(t, compute):
    t = np.asarray(t, dtype=float)
    out = compute(np.atleast_1d(t))
    return float(out[0]) if t.ndim == 0 else out


class Profile:
    """Base class: positive C^1 function f on an open interval with base C0."""

    family = None
    interval = (-math.inf, math.inf)
    C0 = 0.0

    def f(self, t):
        raise NotImplementedError

    def fprime(self, t):
        raise NotImplementedError

    def F(self, t):
        """Arclength coordinate int_C0^t ds/f(s)."""
        raise NotImplementedError

    def U(self, s):
        """Inverse of F; raises OutOfRange when s is not attained."""
        raise NotImplementedError

    def check_domain(self, t):
        t = np.asarray(t, dtype=float)
        lo, hi = self.interval
        if np.any(~np.isfinite(t)) or np.any(t <= lo) or np.any(t >= hi):
            raise OutOfDomain(
                f"value outside the open interval ({lo}, {hi})"
            )

    def safe_range(self):
        """A comfortable closed sub-interval around C0 used for sampling."""
        raise NotImplementedError

    def params_dict(self):
        raise NotImplementedError


@dataclass(frozen=True)
class ConstantProfile(Profile):
    a: float
    C0: float = 0.0
    interval: tuple = (-math.inf, math.inf)
    family = "constant"

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError("constant profile requires a > 0")
        self.check_domain(self.C0)

    def f(self, t):
        self.check_domain(t)
        return _vectorized(t, lambda x: np.full_like(x, self.a))

    def fprime(self, t):
        self.check_domain(t)
        return _vectorized(t, lambda x: np.zeros_like(x))

    def F(self, t):
        self.check_domain(t)
        return _vectorized(t, lambda x: (x - self.C0) / self.a)

    def U(self, s):
        t = _vectorized(s, lambda x: self.C0 + self.a * x)
        self.check_domain(t)
        return t

    def safe_range(self):
        lo, hi = self.interval
        return (max(lo + 0.1, self.C0 - 2.0), min(hi - 0.1, self.C0 + 2.0))

    def params_dict(self):
        return {"a": self.a}


@dataclass(frozen=True)
class AffineProfile(Profile):
    """f(t) = a + b t on the half-line where it is positive."""

    a: float
    b: float
    C0: float = 0.0
    family = "affine"
    interval: tuple = field(init=False)

    def __post_init__(self):
        if self.b == 0:
            raise ValueError("use ConstantProfile for b = 0")
        root = -self.a / self.b
        iv = (root, math.inf) if self.b > 0 else (-math.inf, root)
        object.__setattr__(self, "interval", iv)
        self.check_domain(self.C0)

    def f(self, t):
        self.check_domain(t)
        return _vectorized(t, lambda x: self.a + self.b * x)

    def fprime(self, t):
        self.check_domain(t)
        return _vectorized(t, lambda x: np.full_like(x, self.b))

    def F(self, t):
        self.check_domain(t)
        f0 = self.a + self.b * self.C0
        return _vectorized(
            t, lambda x: np.log((self.a + self.b * x) / f0) / self.b
        )

    def U(self, s):
        f0 = self.a + self.b * self.C0

        def compute(x):
            return (f0 * np.exp(self.b * x) - self.a) / self.b

        t = _vectorized(s, compute)
        self.check_domain(t)
        return t

    def safe_range(self):
        f0 = self.a + self.b * self.C0
        half = 0.5 * f0 / abs(self.b)
        return (self.C0 - half, self.C0 + half)

    def params_dict(self):
        return {"a": self.a, "b": self.b}


@dataclass(frozen=True)
class PowerProfile(Profile):
    """f(t) = a t^p on (0, inf)."""

    a: float
    p: float
    C0: float = 1.0
    interval: tuple = (0.0, math.inf)
    family = "power"

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError("power profile requires a > 0")
        self.check_domain(self.C0)

    def f(self, t):
        self.check_domain(t)
        return _vectorized(t, lambda x: self.a * x**self.p)

    def fprime(self, t):
        self.check_domain(t)
        return _vectorized(t, lambda x: self.a * self.p * x ** (self.p - 1.0))

    def F(self, t):
        self.check_domain(t)
        if self.p == 1.0:
            return _vectorized(t, lambda x: np.log(x / self.C0) / self.a)
        q = 1.0 - self.p
        return _vectorized(t, lambda x: (x**q - self.C0**q) / (self.a * q))

    def U(self, s):
        s_arr = np.atleast_1d(np.asarray(s, dtype=float))
        if self.p == 1.0:
            t_arr = self.C0 * np.exp(self.a * s_arr)
        else:
            q = 1.0 - self.p
            base = self.C0**q + self.a * q * s_arr
            if np.any(base <= 0):
                raise OutOfRange("value not attained by the arclength map")
            t_arr = base ** (1.0 / q)
        t = float(t_arr[0]) if np.ndim(s) == 0 else t_arr
        self.check_domain(t)
        return t

    def safe_range(self):
        return (0.5 * self.C0, 2.0 * self.C0)

    def params_dict(self):
        return {"a": self.a, "p": self.p}


class TabulatedProfile(Profile):
    """Monotone-cubic interpolation of sampled (t, f) nodes.

    The interpolant is C^1 by construction; the arclength coordinate is
    integrated numerically with cumulative values cached at the nodes.
    """

    family = "tabulated"

    def __init__(self, t_nodes, f_nodes, C0=None):
        t_nodes = np.asarray(t_nodes, dtype=float)
        f_nodes = np.asarray(f_nodes, dtype=float)
        if t_nodes.ndim != 1 or t_nodes.shape != f_nodes.shape or len(t_nodes) < 2:
            raise ValueError("need matching 1-d node arrays with >= 2 entries")
        if np.any(np.diff(t_nodes) <= 0):
            raise ValueError("t nodes must be strictly increasing")
        if np.any(f_nodes <= 0):
            raise ValueError("f must be positive at every node")
        self.t_nodes = t_nodes
        self.f_nodes = f_nodes
        self.interval = (float(t_nodes[0]), float(t_nodes[-1]))
        self.C0 = float(C0) if C0 is not None else float(t_nodes[len(t_nodes) // 2])
        self._pchip = PchipInterpolator(t_nodes, f_nodes, extrapolate=False)
        self._dpchip = self._pchip.derivative()
        # cumulative int 1/f between consecutive nodes, then shifted to C0
        inv = lambda x: 1.0 / self._pchip(x)
        cum = np.zeros(len(t_nodes))
        for i in range(1, len(t_nodes)):
            cum[i] = cum[i - 1] + gauss_quad(inv, t_nodes[i - 1], t_nodes[i])
        # shift so that F(C0) = 0
        j = min(max(np.searchsorted(t_nodes, self.C0) - 1, 0), len(t_nodes) - 2)
        F_C0 = cum[j] + gauss_quad(inv, t_nodes[j], self.C0)
        self._node_F = cum - F_C0

    def check_domain(self, t):
        t = np.asarray(t, dtype=float)
        lo, hi = self.interval
        if np.any(~np.isfinite(t)) or np.any(t < lo) or np.any(t > hi):
            raise OutOfDomain(f"value outside the tabulated range [{lo}, {hi}]")

    def f(self, t):
        self.check_domain(t)
        return _vectorized(t, lambda x: np.asarray(self._pchip(x)))

    def fprime(self, t):
        self.check_domain(t)
        return _vectorized(t, lambda x: np.asarray(self._dpchip(x)))

    def _F_scalar(self, t):
        inv = lambda x: 1.0 / self._pchip(x)
        j = np.searchsorted(self.t_nodes, t) - 1
        j = min(max(j, 0), len(self.t_nodes) - 2)
        return self._node_F[j] + gauss_quad(inv, self.t_nodes[j], t)

    def F(self, t):
        self.check_domain(t)
        return _vectorized(
            t, lambda x: np.array([self._F_scalar(ti) for ti in x])
        )

    def U(self, s):
        s_arr = np.atleast_1d(np.asarray(s, dtype=float))
        lo_F, hi_F = self._node_F[0], self._node_F[-1]
        if np.any(s_arr < lo_F - 1e-12) or np.any(s_arr > hi_F + 1e-12):
            raise OutOfRange("value outside the range of the tabulated arclength map")
        s_arr = np.clip(s_arr, lo_F, hi_F)
        j = np.clip(np.searchsorted(self._node_F, s_arr) - 1, 0, len(self.t_nodes) - 2)
        lo = self.t_nodes[j]
        hi = self.t_nodes[j + 1]
        F_vec = lambda x: np.array([self._F_scalar(ti) for ti in np.atleast_1d(x)])
        t_arr = invert_increasing(F_vec, s_arr, lo, hi, f=lambda x: self._pchip(x),
                                  iters=60)
        return float(t_arr[0]) if np.ndim(s) == 0 else t_arr

    def safe_range(self):
        lo, hi = self.interval
        pad = 0.05 * (hi - lo)
        return (lo + pad, hi - pad)

    def params_dict(self):
        return {"t": self.t_nodes.tolist(), "f": self.f_nodes.tolist()}


def forward_map(p, params, t):
    """F(t) for planes, F_k(t) = (k-1)/C1 + F(t) for cylinders.

    Raises NonPositiveFk when the cylinder coordinate drops to <= 0.
    """
    s = p.F(t)
    if params.kind == "plane":
        return s
    fk = params.shift + s
    if np.any(np.asarray(fk) <= 0):
        raise NonPositiveFk("F_k(t) <= 0 outside the admissible range")
    return fk


def inverse_map(p, params, s):
    """Inverse of forward_map; raises OutOfRange when s is not bracketed."""
    if params.kind == "cylinder" and np.any(np.asarray(s, dtype=float) <= 0):
        raise OutOfRange("cylinder coordinate must be positive")
    return p.U(np.asarray(s, dtype=float) - params.shift)


def synth_g(p, params, t):
    """The constitutive g induced by f: f f' for planes,
    f (f' + (k-1)/F_k) for cylinders."""
    fv = p.f(t)
    fp = p.fprime(t)
    if params.kind == "plane":
        return fv * fp
    fk = forward_map(p, params, t)
    return fv * (fp + (params.k - 1) / fk)


class ViscTransform:
    """The harmonizing change of variable G with G'' f^2 + G' g = 0.

    G(t) = int_c1^t exp(-int_c0^tau g/f^2 ds) dtau.  Evaluation caches
    cumulative integrals on a uniform grid so repeated nearby calls stay
    cheap and smooth.
    """

    def __init__(self, p, g, c0, c1, step=0.05):
        p.check_domain(c0)
        p.check_domain(c1)
        self.p = p
        self.g = g
        self.c0 = float(c0)
        self.c1 = float(c1)

        def log_deriv(tau):
            tau = np.asarray(tau)
            return np.asarray(g(tau)) / np.asarray(p.f(tau)) ** 2

        self._E = CachedAntiderivative(log_deriv, anchor=self.c0, step=step)
        self._G = CachedAntiderivative(self.prime, anchor=self.c1, step=step)
        self._step = step

    def prime(self, t):
        """G'(t) = exp(-int_c0^t g/f^2); strictly positive."""
        return np.exp(-self._E(t))

    def __call__(self, t):
        self.p.check_domain(t)
        return self._G(t)

    def inverse(self, s):
        """H with H(G(t)) = t, by bracketed root finding."""
        s = float(s)
        lo, hi = self.p.interval
        if math.isfinite(hi):
            hi = hi - 1e-12 * max(1.0, abs(hi))
        if math.isfinite(lo):
            lo = lo + 1e-12 * max(1.0, abs(lo))

        def expand(endpoint, toward):
            x = self.c1
            step = self._step
            for _ in range(200):
                nxt = min(x + step, toward) if endpoint == "hi" else max(x - step, toward)
                if nxt == x:
                    break
                x = nxt
                val = self._G(x)
                if (endpoint == "hi" and val >= s) or (endpoint == "lo" and val <= s):
                    return x
                step *= 2.0
            raise OutOfRange("value beyond the range of G on the interval")

        if s >= 0.0:
            a, b = self.c1, expand("hi", hi)
        else:
            a, b = expand("lo", lo), self.c1
        return brentq(lambda t: self._G(t) - s, a, b, xtol=1e-14, rtol=1e-15)


def visc_transform(p, g, c0, c1, t):
    """Convenience wrapper: evaluate the harmonizing transform G at t."""
    return ViscTransform(p, g, c0, c1)(t)


def _unit_integrand(c, d):
    c = np.asarray(c, dtype=float)
    d = np.asarray(d, dtype=float)

    def integrand(tau):
        tau = np.asarray(tau, dtype=float)
        base = 1.0 + c[:, None] * tau[None, :] if tau.ndim else 1.0 + c * tau
        if tau.ndim:
            return np.prod(base ** (-d[:, None]), axis=0)
        return float(np.prod(base ** (-d)))

    return integrand


def _check_poles(c, t):
    c = np.asarray(c, dtype=float)
    if c.size and np.any(1.0 + c * t <= 0.0):
        raise PoleCrossed("1 + c_i tau vanishes on the integration path")


def harmonize_unit(c, d, t):
    """G~(t) = int_0^t prod_i (1 + c_i tau)^(-d_i) dtau.

    The empty product gives G~(t) = t.  Raises PoleCrossed when some
    1 + c_i tau <= 0 between 0 and t.
    """
    c = np.asarray(c, dtype=float)
    d = np.asarray(d, dtype=float)
    if c.shape != d.shape:
        raise ValueError("c and d must have equal length")
    t = float(t)
    if c.size == 0:
        return t
    _check_poles(c, t)
    fn = _unit_integrand(c, d)
    return gauss_quad(lambda x: fn(np.asarray(x)), 0.0, t)


def harmonize_unit_prime(c, d, t):
    """Derivative prod_i (1 + c_i t)^(-d_i) of the unit-gradient harmonizer."""
    c = np.asarray(c, dtype=float)
    d = np.asarray(d, dtype=float)
    t = float(t)
    if c.size == 0:
        return 1.0
    _check_poles(c, t)
    return float(np.prod((1.0 + c * t) ** (-d)))


_FAMILIES = {"constant", "affine", "power", "tabulated"}


def _num_from_json(x):
    if x == "inf":
        return math.inf
    if x == "-inf":
        return -math.inf
    return float(x)


def _num_to_json(x):
    if x == math.inf:
        return "inf"
    if x == -math.inf:
        return "-inf"
    return float(x)


def profile_to_dict(p):
    return {
        "family": p.family,
        "params": p.params_dict(),
        "interval": [_num_to_json(p.interval[0]), _num_to_json(p.interval[1])],
        "C0": p.C0,
    }


def profile_from_dict(dct):
    family = dct.get("family")
    if family not in _FAMILIES:
        raise ValueError(f"unknown profile family {family!r}")
    params = dct.get("params", {})
    C0 = float(dct["C0"])
    if family == "constant":
        p = ConstantProfile(a=float(params["a"]), C0=C0)
    elif family == "affine":
        p = AffineProfile(a=float(params["a"]), b=float(params["b"]), C0=C0)
    elif family == "power":
        p = PowerProfile(a=float(params["a"]), p=float(params["p"]), C0=C0)
    else:
        p = TabulatedProfile(params["t"], params["f"], C0=C0)
    if "interval" in dct:
        lo = _num_from_json(dct["interval"][0])
        hi = _num_from_json(dct["interval"][1])
        plo, phi = p.interval
        if lo < plo - 1e-12 or hi > phi + 1e-12:
            raise ValueError("declared interval exceeds the family's natural domain")
    return p
