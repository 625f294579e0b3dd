"""Shared quadrature and inversion helpers.

All integrals in the toolkit go through composite fixed-order Gauss-Legendre
panels.  A fixed rule makes the computed antiderivative a smooth function of
its endpoint, so finite-difference checks of downstream quantities keep their
theoretical convergence order (adaptive subdivision would inject non-smooth
error at the tolerance level).
"""
import numpy as np

_GL_ORDER = 20
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(_GL_ORDER)

DEFAULT_PANEL = 0.05


def gauss_panel(fn, a, b):
    """Single Gauss-Legendre panel of `fn` over [a, b] (vectorized `fn`)."""
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    return half * np.dot(_GL_WEIGHTS, fn(mid + half * _GL_NODES))


def gauss_quad(fn, a, b, panel=DEFAULT_PANEL):
    """Composite Gauss-Legendre integral of `fn` from a to b.

    The panel count is ceil(|b-a|/panel); the rule is exact to machine
    precision for the smooth integrands used in this package.
    """
    if a == b:
        return 0.0
    m = max(1, int(np.ceil(abs(b - a) / panel)))
    edges = np.linspace(a, b, m + 1)
    total = 0.0
    for i in range(m):
        total += gauss_panel(fn, edges[i], edges[i + 1])
    return total


class CachedAntiderivative:
    """Lazily extended antiderivative t -> int_anchor^t fn.

    Cumulative values are cached on a uniform grid around the anchor; an
    evaluation costs one Gauss panel beyond the nearest cached grid point.
    """

    def __init__(self, fn, anchor, step=DEFAULT_PANEL):
        self.fn = fn
        self.anchor = float(anchor)
        self.step = float(step)
        self._right = [0.0]  # values at anchor + i*step
        self._left = [0.0]  # values at anchor - i*step

    def _grid_value(self, j):
        if j >= 0:
            cache = self._right
            while len(cache) <= j:
                i = len(cache)
                a = self.anchor + (i - 1) * self.step
                cache.append(cache[-1] + gauss_panel(self.fn, a, a + self.step))
            return cache[j]
        cache = self._left
        while len(cache) <= -j:
            i = len(cache)
            a = self.anchor - (i - 1) * self.step
            cache.append(cache[-1] + gauss_panel(self.fn, a, a - self.step))
        return cache[-j]

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if t.ndim == 0:
            return self._scalar(float(t))
        return np.array([self._scalar(float(ti)) for ti in t.ravel()]).reshape(t.shape)

    def _scalar(self, t):
        j = int(np.floor((t - self.anchor) / self.step))
        # integrate from the nearest cached edge at or below t
        base = self._grid_value(j) if j >= 0 else self._grid_value(j + 1)
        edge = self.anchor + (j if j >= 0 else j + 1) * self.step
        if t == edge:
            return base
        return base + gauss_panel(self.fn, edge, t)


def invert_increasing(F, s, lo, hi, f=None, iters=90):
    """Solve F(t) = s for a strictly increasing F on brackets [lo, hi].

    Vectorized bisection, optionally polished with two Newton steps using the
    derivative reciprocal `f` (i.e. t -> t - (F(t)-s)*f(t) for F' = 1/f).
    Inputs may be scalars or arrays; brackets must already be valid.
    """
    s = np.asarray(s, dtype=float)
    lo = np.broadcast_to(np.asarray(lo, dtype=float), s.shape).copy()
    hi = np.broadcast_to(np.asarray(hi, dtype=float), s.shape).copy()
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        high = F(mid) > s
        hi = np.where(high, mid, hi)
        lo = np.where(high, lo, mid)
    t = 0.5 * (lo + hi)
    if f is not None:
        for _ in range(2):
            t = np.clip(t - (F(t) - s) * f(t), lo, hi)
    return t
