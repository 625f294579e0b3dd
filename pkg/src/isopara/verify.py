"""Numerical verification of the dynamical and PDE structure.

Checks that gradient lines of unit-gradient fields are straight with unit
level shift, that the level-set Hessian evolves as kappa/(1 + t kappa) along
them, that the harmonizing transforms render the field harmonic, and the
sign convention of the first-order equation.
"""
from dataclasses import dataclass

import numpy as np

from . import fields as flds
from . import spectral
from .errors import (
    CriticalPoint,
    DomainExit,
    FocalPoint,
    InadmissibleSegment,
    InadmissibleStencil,
    IsoparError,
)

FOCAL_EPS = 1e-8


def _unit_jet(v, x, h):
    """(value, gradient, Hessian) of a unit-gradient field: closed form for
    canonical fields, finite differences for black boxes."""
    if isinstance(v, (flds.PlaneField, flds.CylinderField)):
        return flds.v_jet(v, x)
    j = flds.fd_jet(v, np.asarray(x, dtype=float), h)
    return j.u, j.grad, j.hess


@dataclass(frozen=True)
class FlowCheck:
    """Residuals of the three straight-line identities at step t."""

    level_shift: float  # |v(z) - v(x) - t|
    grad_drift: float  # ||grad v(z) - grad v(x)||
    hess_evolution: float  # Frobenius gap to sum kappa/(1+t kappa) P


def flow_checks(v, x, t, h=1e-5, group_tol=spectral.DEFAULT_GROUP_TOL):
    """Verify the gradient-line identities of a unit-gradient field.

    Raises FocalPoint when 1 + t*kappa drops below the guard for some
    eigenvalue (level sets focusing), and InadmissibleSegment when the
    endpoint cannot be evaluated.
    """
    x = np.asarray(x, dtype=float)
    v0, g0, H0 = _unit_jet(v, x, h)
    if abs(np.linalg.norm(g0) - 1.0) > 1e-8:
        raise ValueError("field does not have unit gradient at x")
    dec = spectral.sym_eig(H0, group_tol)
    factors = 1.0 + t * dec.kappas
    if np.any(factors <= FOCAL_EPS):
        raise FocalPoint(f"1 + t*kappa reaches {factors.min():.3e}")
    z = x + t * g0
    try:
        v1, g1, H1 = _unit_jet(v, z, h)
    except IsoparError as exc:
        raise InadmissibleSegment(f"endpoint not admissible: {exc}") from exc
    predicted = np.zeros_like(H0)
    for kappa, fac, P in zip(dec.kappas, factors, dec.projections):
        predicted += (kappa / fac) * P
    return FlowCheck(
        level_shift=abs(v1 - v0 - t),
        grad_drift=float(np.linalg.norm(g1 - g0)),
        hess_evolution=float(np.linalg.norm(H1 - predicted)),
    )


def integrate_flow(u, x0, tau_max, rk_steps=1000, mode=None, h=None):
    """RK4 integration of the gradient flow c' = grad u(c).

    Returns (taus, path, h_values, h_law_residual) where the residual is the
    worst gap between the central difference of h(tau) = u(c(tau)) and
    |grad u|^2 along the path.
    """
    x0 = np.asarray(x0, dtype=float)
    canonical = isinstance(u, (flds.PlaneField, flds.CylinderField))
    if mode is None:
        mode = "analytic" if canonical else "fd"
    if h is None:
        h = 1e-4 * max(1.0, float(np.linalg.norm(x0)))
    u_call = flds.as_callable(u) if canonical else u

    def grad(x):
        if mode == "analytic":
            g = flds.analytic_jet(u, x).grad
        else:
            n = len(x)
            pts = []
            for i in range(n):
                e = np.zeros(n)
                e[i] = h
                pts.extend([x + e, x - e])
            vals = np.asarray(u_call(np.array(pts)), dtype=float)
            g = (vals[0::2] - vals[1::2]) / (2 * h)
        if np.linalg.norm(g) <= flds.EPS_GRAD:
            raise CriticalPoint("gradient vanished along the flow")
        return g

    dt = tau_max / rk_steps
    path = [x0.copy()]
    x = x0.copy()
    try:
        for _ in range(rk_steps):
            k1 = grad(x)
            k2 = grad(x + 0.5 * dt * k1)
            k3 = grad(x + 0.5 * dt * k2)
            k4 = grad(x + dt * k3)
            x = x + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
            path.append(x.copy())
    except CriticalPoint:
        raise
    except IsoparError as exc:
        raise DomainExit(f"gradient flow left the domain: {exc}") from exc
    path = np.array(path)
    taus = dt * np.arange(rk_steps + 1)
    h_vals = np.asarray(u_call(path), dtype=float)
    g2 = np.array([float(np.dot(grad(p), grad(p))) for p in path])
    if rk_steps >= 2:
        dh = (h_vals[2:] - h_vals[:-2]) / (2 * dt)
        residual = float(np.abs(dh - g2[1:-1]).max())
    else:
        residual = float("nan")
    return taus, path, h_vals, residual


def harmonic_residual(w, x, h):
    """Central 2n+1-point finite-difference Laplacian of a black box at x."""
    x = np.asarray(x, dtype=float)
    if h <= 0:
        raise ValueError("h must be positive")
    n = len(x)
    pts = [x]
    for i in range(n):
        e = np.zeros(n)
        e[i] = h
        pts.extend([x + e, x - e])
    try:
        vals = np.asarray(w(np.array(pts)), dtype=float)
    except IsoparError as exc:
        raise InadmissibleStencil(f"stencil point not admissible: {exc}") from exc
    except Exception as exc:
        raise InadmissibleStencil(f"stencil evaluation failed: {exc}") from exc
    if not np.all(np.isfinite(vals)):
        raise InadmissibleStencil("stencil produced non-finite values")
    total = 0.0
    for i in range(n):
        total += vals[1 + 2 * i] - 2.0 * vals[0] + vals[2 + 2 * i]
    return float(total / h**2)


def sign_convention(t):
    """+1 for t >= 0, -1 otherwise; bit-exact and total on finite inputs."""
    t = float(t)
    if not np.isfinite(t):
        raise ValueError("t must be finite")
    return 1 if t >= 0.0 else -1
