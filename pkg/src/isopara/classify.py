"""Plane/cylinder classification of a C^2 scalar field from local data.

Given jets at a probe point the classifier forms the unit-gradient Hessian,
groups its eigenvalues, and reads the case off the number m of distinct
nonzero clusters: m = 0 is a plane, m = 1 a generalized cylinder with
curvature c1 and curved dimension k = d1 + 1, and m >= 2 is rejected (no
isoparametric field admits it; the Cartan sums are reported as diagnostics).
"""
from dataclasses import dataclass, field as dc_field

import numpy as np

from . import fields as flds
from . import spectral
from .errors import (
    CriticalPoint,
    DomainExit,
    GroupingAmbiguous,
    IsoparError,
    ProfileRangeExceeded,
)
from .profile import TabulatedProfile, TransformParams, synth_g

DEFAULT_TOL = 1e-8
DEFAULT_TOL_ZERO = 1e-7
FD_WIDENING = 1e3


@dataclass
class ClassificationReport:
    """Outcome of a local classification: case, recovered parameters,
    residual statistics and the tolerances that produced them."""

    case: str  # "plane" | "cylinder" | "reject"
    n: int
    probe: np.ndarray
    negated: bool
    mode: str
    tolerances: dict
    q: np.ndarray | None = None
    x0: np.ndarray | None = None
    k: int | None = None
    c1: float | None = None
    C1: float | None = None
    R0: np.ndarray | None = None
    x_star: np.ndarray | None = None
    reject_reason: str | None = None
    residuals: dict = dc_field(default_factory=dict)
    diagnostics: dict = dc_field(default_factory=dict)

    def to_dict(self):
        def conv(v):
            if isinstance(v, np.ndarray):
                return v.tolist()
            if isinstance(v, (np.floating, np.integer)):
                return v.item()
            if isinstance(v, dict):
                return {k: conv(x) for k, x in v.items()}
            if isinstance(v, (list, tuple)):
                return [conv(x) for x in v]
            return v

        out = {
            "case": self.case,
            "n": self.n,
            "probe": conv(self.probe),
            "negated": self.negated,
            "mode": self.mode,
            "tolerances": conv(self.tolerances),
            "residuals": conv(self.residuals),
            "diagnostics": conv(self.diagnostics),
        }
        if self.case == "plane":
            out["params"] = {"q": conv(self.q), "x0": conv(self.x0), "C1": 0.0}
        elif self.case == "cylinder":
            out["params"] = {
                "k": self.k,
                "c1": self.c1,
                "C1": self.C1,
                "R0": conv(self.R0),
                "x_star": conv(self.x_star),
            }
        else:
            out["reason"] = self.reject_reason
        return out


def _grad(u_call, x, h):
    n = len(x)
    pts = []
    for i in range(n):
        e = np.zeros(n)
        e[i] = h
        pts.extend([x + e, x - e])
    vals = np.asarray(u_call(np.array(pts)), dtype=float)
    return (vals[0::2] - vals[1::2]) / (2 * h)


def _flow_derivative(u, mode, h):
    """dx/dt = grad u / |grad u|^2 so the flow is parametrized by u itself."""
    if mode == "analytic":
        def deriv(x):
            g = flds.analytic_jet(u, x).grad
            gn2 = float(g @ g)
            if gn2 <= flds.EPS_GRAD**2:
                raise CriticalPoint("gradient vanished along the flow")
            return g / gn2
    else:
        u_call = flds.as_callable(u) if isinstance(
            u, (flds.PlaneField, flds.CylinderField)) else u

        def deriv(x):
            g = _grad(u_call, x, h)
            gn2 = float(g @ g)
            if gn2 <= flds.EPS_GRAD**2:
                raise CriticalPoint("gradient vanished along the flow")
            return g / gn2
    return deriv


def estimate_profile(u, x0, span, steps=64, mode=None, h=None):
    """Tabulate f along the gradient flow through x0.

    The flow is integrated with RK4 using u itself as the parameter, so the
    recorded nodes are (t, |grad u|) with t = u exactly along the path.
    A negative span integrates against the gradient.
    """
    x0 = np.asarray(x0, dtype=float)
    canonical = isinstance(u, (flds.PlaneField, flds.CylinderField))
    if mode is None:
        mode = "analytic" if canonical else "fd"
    if h is None:
        h = 1e-4 * max(1.0, float(np.linalg.norm(x0)))
    if steps < 2:
        raise ValueError("need at least 2 steps")
    deriv = _flow_derivative(u, mode, h)
    u_call = flds.as_callable(u) if canonical else u

    def gradnorm(x):
        if mode == "analytic":
            g = flds.analytic_jet(u, x).grad
        else:
            g = _grad(u_call, x, h)
        gn = float(np.linalg.norm(g))
        if gn <= flds.EPS_GRAD:
            raise CriticalPoint("gradient vanished along the flow")
        return gn

    t0 = float(np.asarray(u_call(x0[None, :]))[0])
    dt = span / steps
    x = x0.copy()
    ts = [t0]
    fs = [gradnorm(x0)]
    try:
        for i in range(steps):
            k1 = deriv(x)
            k2 = deriv(x + 0.5 * dt * k1)
            k3 = deriv(x + 0.5 * dt * k2)
            k4 = deriv(x + dt * k3)
            x = x + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
            ts.append(t0 + (i + 1) * dt)
            fs.append(gradnorm(x))
    except CriticalPoint:
        raise
    except IsoparError as exc:
        raise DomainExit(f"gradient flow left the domain: {exc}") from exc
    ts = np.array(ts)
    fs = np.array(fs)
    if span < 0:
        ts = ts[::-1]
        fs = fs[::-1]
    return TabulatedProfile(ts, fs, C0=t0)


def _estimate_two_sided(u, x0, lo, hi, steps, mode, h):
    """Profile table covering [lo, hi] around t0 = u(x0), flowing both ways."""
    canonical = isinstance(u, (flds.PlaneField, flds.CylinderField))
    u_call = flds.as_callable(u) if canonical else u
    t0 = float(np.asarray(u_call(np.asarray(x0, float)[None, :]))[0])
    parts = []
    if hi > t0:
        parts.append(estimate_profile(u, x0, hi - t0, steps, mode=mode, h=h))
    if lo < t0:
        parts.append(estimate_profile(u, x0, lo - t0, steps, mode=mode, h=h))
    ts = np.concatenate([p.t_nodes for p in parts])
    fs = np.concatenate([p.f_nodes for p in parts])
    order = np.argsort(ts)
    ts, fs = ts[order], fs[order]
    keep = np.concatenate([[True], np.diff(ts) > 1e-14 * max(1.0, abs(t0))])
    return TabulatedProfile(ts[keep], fs[keep], C0=t0)


def classify(u, x0, tol=DEFAULT_TOL, *, mode=None, h=None,
             group_tol=spectral.DEFAULT_GROUP_TOL, tol_zero=DEFAULT_TOL_ZERO,
             with_reconstruction=True, n_samples=32, seed=0):
    """Classify a field as plane / cylinder / reject from its jet at x0.

    Canonical fields use exact chain-rule jets; black boxes use central
    differences with step h, and all decision tolerances are widened by
    10^3 in that mode.
    """
    x0 = np.asarray(x0, dtype=float)
    canonical = isinstance(u, (flds.PlaneField, flds.CylinderField))
    if mode is None:
        mode = "analytic" if canonical else "fd"
    widen = 1.0 if mode == "analytic" else FD_WIDENING
    j = flds.jet(u, x0, mode=mode, h=h)
    ops = flds.operators(j)

    negated = ops.onelap < 0
    if negated:
        j = j.negated()
        ops = flds.operators(j)
    u_call = flds.as_callable(u) if canonical else u
    work_call = (lambda X: -np.asarray(u_call(X))) if negated else u_call

    dec = spectral.sym_eig(ops.hess_v, group_tol)
    rho = float(np.abs(dec.kappas).max()) if dec.s else 0.0
    zero_scale = tol_zero * (1.0 + rho) * widen
    abs_k = np.abs(dec.kappas)
    ambiguous = (abs_k > zero_scale) & (abs_k <= 10 * zero_scale)
    if np.any(ambiguous):
        raise GroupingAmbiguous(
            "eigenvalues straddle the zero threshold", gaps=dec.kappas.tolist()
        )
    nonzero = [i for i in range(dec.s) if abs_k[i] > zero_scale]
    m = len(nonzero)
    nhat = j.grad / ops.gradnorm

    tolerances = {
        "tol": tol,
        "group_tol": group_tol,
        "tol_zero": tol_zero,
        "eps_grad": flds.EPS_GRAD,
        "fd_widening": widen,
        "h": h,
    }
    diagnostics = {
        "kappas": dec.kappas.tolist(),
        "mults": dec.mults.tolist(),
        "m": m,
        "onelap": ops.onelap,
        "grad_eigen_residual": float(np.linalg.norm(ops.hess_v @ nhat)),
    }
    rep = ClassificationReport(
        case="reject", n=len(x0), probe=x0, negated=bool(negated), mode=mode,
        tolerances=tolerances, diagnostics=diagnostics,
    )

    if m == 0:
        rep.case = "plane"
        rep.q = nhat
        rep.x0 = x0
        rep.C1 = 0.0
    elif m == 1:
        i = nonzero[0]
        c1 = float(dec.kappas[i])
        if c1 <= 0:
            rep.reject_reason = (
                "nonzero curvature cluster is negative after sign normalization"
            )
            return rep
        d1 = int(dec.mults[i])
        k = d1 + 1
        R0 = dec.projections[i] + np.outer(nhat, nhat)
        rep.case = "cylinder"
        rep.k = k
        rep.c1 = c1
        rep.C1 = (k - 1) * c1
        rep.R0 = 0.5 * (R0 + R0.T)
        rep.x_star = x0 - nhat / c1
    else:
        cartans = {}
        for i in nonzero:
            kap = float(dec.kappas[i])
            cartans[repr(kap)] = {
                "sum": spectral.cartan_sum(dec.kappas, dec.mults, i),
                "terms": spectral.cartan_terms(dec.kappas, dec.mults, i).tolist(),
            }
        rep.reject_reason = (
            f"{m} distinct nonzero curvature clusters; no isoparametric field "
            "admits more than one"
        )
        rep.diagnostics["cartan"] = cartans
        return rep

    if with_reconstruction:
        rng = np.random.default_rng(seed)
        scale = 0.2 * (1.0 / rep.c1 if rep.case == "cylinder" else 1.0)
        samples = x0 + scale * rng.standard_normal((n_samples, len(x0)))
        analytic_ok = canonical and not negated and mode == "analytic"
        try:
            rep.residuals = verify_reconstruction(
                rep, u if analytic_ok else work_call, samples,
                mode="analytic" if analytic_ok else "fd", h=h)
        except (IsoparError, ValueError) as exc:
            rep.diagnostics["reconstruction_error"] = f"{type(exc).__name__}: {exc}"
    return rep


def _reconstructed_eval(rep, prof):
    params = (TransformParams.plane() if rep.case == "plane"
              else TransformParams.cylinder(rep.k, rep.C1))

    def u_hat(X):
        X = np.asarray(X, dtype=float)
        if rep.case == "plane":
            s = (X - rep.x0) @ rep.q
            return prof.U(s)
        w = (X - rep.x_star) @ rep.R0
        r = np.linalg.norm(w, axis=-1)
        return prof.U(r - params.shift)

    return u_hat, params


def verify_reconstruction(rep, u, samples, mode="fd", h=None, steps=64):
    """Residual statistics of the canonical field rebuilt from a report.

    Estimates the profile along the gradient flow through the probe, then
    compares u against the reconstruction and checks the radial identity
    |v + 1/c1| = |R0 (x - x_star)| for cylinders.  Returns max/rms stats.
    """
    if rep.case == "reject":
        raise ValueError("cannot reconstruct from a rejected report")
    samples = np.asarray(samples, dtype=float)
    u_call = flds.as_callable(u) if isinstance(
        u, (flds.PlaneField, flds.CylinderField)) else u
    if h is None:
        h = 1e-4 * max(1.0, float(np.linalg.norm(rep.probe)))
    u_vals = np.asarray(u_call(samples), dtype=float)
    t0 = float(np.asarray(u_call(rep.probe[None, :]))[0])
    lo = min(u_vals.min(), t0)
    hi = max(u_vals.max(), t0)
    pad = 0.05 * (hi - lo) + 1e-9 * max(1.0, abs(t0))
    prof = _estimate_two_sided(u, rep.probe, lo - pad, hi + pad, steps, mode, h)
    if u_vals.min() < prof.interval[0] or u_vals.max() > prof.interval[1]:
        raise ProfileRangeExceeded("sample values leave the estimated profile table")
    u_hat, params = _reconstructed_eval(rep, prof)
    recon = np.abs(u_vals - u_hat(samples))

    # pointwise system residuals against the estimated profile
    grad_res = []
    lap_res = []
    for x in samples:
        jx = flds.jet(u, x, mode=mode, h=h) if mode == "analytic" else flds.fd_jet(
            u_call, x, h)
        ux = float(np.asarray(u_call(x[None, :]))[0])
        grad_res.append(abs(float(np.linalg.norm(jx.grad)) - prof.f(ux)))
        lap_res.append(abs(float(np.trace(jx.hess)) - synth_g(prof, params, ux)))
    out = {
        "recon_max": float(recon.max()),
        "recon_rms": float(np.sqrt(np.mean(recon**2))),
        "gradnorm_max": float(np.max(grad_res)),
        "laplacian_max": float(np.max(lap_res)),
    }
    if rep.case == "cylinder":
        v = prof.F(u_vals)
        radial = np.linalg.norm((samples - rep.x_star) @ rep.R0, axis=-1)
        semi = np.abs(np.abs(v + 1.0 / rep.c1) - radial)
        out["semiexp_max"] = float(semi.max())
    return out


def isoparametric_check(u, samples, tol, tol_u=None, tol_g=None,
                        mode=None, h=None):
    """Statistical test that |grad u| and Lap u are functions of u alone.

    Samples are bucketed by u-value into bins of width tol_u; within each
    bin the spread of |grad u| must stay below tol and the spread of Lap u
    below tol_g.
    """
    samples = np.asarray(samples, dtype=float)
    if len(samples) < 2:
        raise ValueError("need at least 2 samples")
    canonical = isinstance(u, (flds.PlaneField, flds.CylinderField))
    if mode is None:
        mode = "analytic" if canonical else "fd"
    if tol_u is None:
        tol_u = tol
    if tol_g is None:
        tol_g = 100.0 * tol
    rows = []
    for x in samples:
        jx = flds.jet(u, x, mode=mode, h=h)
        ops = flds.operators(jx)  # raises CriticalPoint
        rows.append((jx.u, ops.gradnorm, ops.laplacian))
    rows.sort(key=lambda r: r[0])
    bins = []
    current = [rows[0]]
    for row in rows[1:]:
        if row[0] - current[0][0] <= tol_u:
            current.append(row)
        else:
            bins.append(current)
            current = [row]
    bins.append(current)
    stats = []
    ok = True
    for b in bins:
        gs = [r[1] for r in b]
        ls = [r[2] for r in b]
        spread_g = max(gs) - min(gs)
        spread_l = max(ls) - min(ls)
        ok = ok and spread_g <= tol and spread_l <= tol_g
        stats.append({
            "u_lo": b[0][0], "u_hi": b[-1][0], "count": len(b),
            "gradnorm_spread": spread_g, "laplacian_spread": spread_l,
        })
    return {"isoparametric": bool(ok), "bins": stats,
            "tol": tol, "tol_u": tol_u, "tol_g": tol_g}
