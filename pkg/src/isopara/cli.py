"""Command-line front end.

Subcommands: synthesize, classify, verify, invert-moments, profile.  All
randomness is seeded (--seed, default 0, overridable via ISOPARA_SEED);
outputs are byte-stable for fixed inputs and seed.  Exit codes: 0 success,
1 failed verification suite, 2 schema/parse errors.
"""
import argparse
import json
import os
import sys

import numpy as np

from isopara import fields as flds
from isopara import moments
from isopara import profile as prof_mod
from isopara import spectral
from isopara import verify as vfy
from isopara.classify import DEFAULT_TOL, classify, isoparametric_check
from .errors import IsoparError


def _default_seed():
    env = os.environ.get("ISOPARA_SEED")
    return int(env) if env else 0


def _parse_vector(text):
    return np.array([float(tok) for tok in text.split(",")])


def _load_field(path):
    if path.endswith(".json"):
        with open(path) as fh:
            return flds.make_field(json.load(fh))
    if path.endswith(".csv"):
        return flds.GridField.read(path)
    raise ValueError(f"field file must be .json or .csv, got {path!r}")


def _dump_json(obj, path):
    text = json.dumps(obj, indent=2, sort_keys=True)
    if path is None:
        print(text)
    else:
        with open(path, "w") as fh:
            fh.write(text + "\n")


def _cmd_synthesize(args):
    with open(args.spec) as fh:
        fld = flds.make_field(json.load(fh))
    _dump_json(flds.field_to_dict(fld), args.out)
    if args.samples:
        rng = np.random.default_rng(args.seed)
        X = flds.sample_points(fld, args.samples, rng)
        rows = []
        for x in X:
            j = flds.analytic_jet(fld, x)
            ops = flds.operators(j)
            rows.append(list(x) + [j.u, ops.gradnorm, ops.laplacian, ops.onelap])
        n = fld.n
        header = ",".join([f"x{i+1}" for i in range(n)]
                          + ["u", "gradnorm", "laplacian", "onelap"])
        with open(args.csv, "w") as fh:
            fh.write(header + "\n")
            for row in rows:
                fh.write(",".join(repr(float(v)) for v in row) + "\n")
    return 0


def _cmd_classify(args):
    fld = _load_field(args.field)
    x0 = _parse_vector(args.at)
    kwargs = {}
    if args.group_tol is not None:
        kwargs["group_tol"] = args.group_tol
    if args.tol_zero is not None:
        kwargs["tol_zero"] = args.tol_zero
    rep = classify(fld, x0, tol=args.tol, mode=args.mode, h=args.h, **kwargs)
    _dump_json(rep.to_dict(), args.report)
    return 0


def _suite_points(fld, rng, count):
    if isinstance(fld, (flds.PlaneField, flds.CylinderField)):
        return flds.sample_points(fld, count, rng)
    raise ValueError("this suite needs a canonical field; pass --at for grids")


def _run_suite(fld, suite, rng, tol, at):
    canonical = isinstance(fld, (flds.PlaneField, flds.CylinderField))
    results = []
    if not canonical and at is None and suite in ("flow", "isoparametric",
                                                  "cartan"):
        raise ValueError("grid fields need --at for this suite")
    if suite == "flow":
        pts = _suite_points(fld, rng, 5) if canonical and at is None else \
            at + 0.01 * rng.standard_normal((5, len(at)))
        for x in pts:
            _, path, _, res = vfy.integrate_flow(fld, x, 0.5, 200)
            results.append({"x": x.tolist(), "h_law_residual": res,
                            "pass": res <= tol})
    elif suite == "hessian-evolution":
        if not canonical:
            raise ValueError("hessian-evolution suite needs a canonical field")
        pts = _suite_points(fld, rng, 10)
        for x in pts:
            t = float(rng.uniform(-0.2, 0.5))
            try:
                fc = vfy.flow_checks(fld, x, t)
            except IsoparError as exc:
                results.append({"x": x.tolist(), "t": t, "pass": True,
                                "guarded": f"{type(exc).__name__}"})
                continue
            worst = max(fc.level_shift, fc.grad_drift, fc.hess_evolution)
            results.append({"x": x.tolist(), "t": t, "residual": worst,
                            "pass": worst <= tol})
    elif suite == "harmonic":
        if not canonical:
            raise ValueError("harmonic suite needs a canonical field")
        p = fld.profile
        params = (prof_mod.TransformParams.plane() if fld.kind == "plane"
                  else fld.params)
        g = lambda t: prof_mod.synth_g(p, params, t)
        G = prof_mod.ViscTransform(p, g, p.C0, p.C0)
        w = lambda X: np.array([G(v) for v in np.atleast_1d(
            flds.evaluate(fld, np.atleast_2d(X)))])
        pts = _suite_points(fld, rng, 20)
        if fld.kind == "cylinder":
            # keep the stencil well away from the axis where the fourth
            # derivative (hence the FD truncation error) blows up
            r = np.linalg.norm((pts - fld.x_star) @ fld.R0, axis=1)
            pts = pts[r >= 0.6 * fld.shift]
        pts = pts[:5]
        for x in pts:
            res = abs(vfy.harmonic_residual(w, x, 1e-3))
            results.append({"x": x.tolist(), "residual": res,
                            "pass": res <= max(tol, 1e-5)})
    elif suite == "isoparametric":
        pts = (_suite_points(fld, rng, 40) if canonical
               else at + 0.05 * rng.standard_normal((40, len(at))))
        out = isoparametric_check(fld, pts, tol=max(tol, 1e-8))
        results.append({"verdict": out["isoparametric"], "bins": out["bins"],
                        "pass": out["isoparametric"]})
    elif suite == "cartan":
        pts = (_suite_points(fld, rng, 10) if canonical
               else at + 0.05 * rng.standard_normal((10, len(at))))
        for x in pts:
            j = flds.jet(fld, x, mode="analytic" if canonical else "fd")
            ops = flds.operators(j)
            dec = spectral.sym_eig(ops.hess_v)
            scale = 1e-7 * (1.0 + float(np.abs(dec.kappas).max()))
            nz = [i for i in range(dec.s) if abs(dec.kappas[i]) > scale]
            entry = {"x": x.tolist(), "m": len(nz), "pass": len(nz) <= 1}
            if len(nz) >= 2:
                entry["cartan_sums"] = [_safe_cartan(dec, i) for i in nz]
            results.append(entry)
    else:
        raise ValueError(f"unknown suite {suite!r}")
    return results


def _safe_cartan(dec, i):
    try:
        return spectral.cartan_sum(dec.kappas, dec.mults, i)
    except ValueError:
        return None


def _cmd_verify(args):
    fld = _load_field(args.field)
    rng = np.random.default_rng(args.seed)
    at = _parse_vector(args.at) if args.at else None
    results = _run_suite(fld, args.suite, rng, args.tol, at)
    passed = all(r["pass"] for r in results)
    _dump_json({"suite": args.suite, "tol": args.tol, "passed": passed,
                "results": results}, args.report)
    return 0 if passed else 1


def _cmd_invert_moments(args):
    C = _parse_vector(args.C)
    d = np.array([int(x) for x in args.d.split(",")])
    sys_ = moments.MomentSystem(d=d, C=C)
    if args.guess:
        y0 = _parse_vector(args.guess)
    else:
        # heuristic: spread around the mean value C1 / sum(d)
        center = float(C[0]) / float(d.sum())
        y0 = center + np.linspace(-1.0, 1.0, sys_.m)
    kappas = moments.invert_moments(sys_, y0)
    print(json.dumps({"kappas": kappas.tolist()}, sort_keys=True))
    return 0


def _cmd_profile(args):
    with open(args.spec) as fh:
        p = prof_mod.profile_from_dict(json.load(fh))
    if args.op in ("Fk", "Uk", "g") or (args.op == "G" and args.C1):
        params = prof_mod.TransformParams.cylinder(args.k, args.C1) \
            if args.C1 else prof_mod.TransformParams.plane()
    else:
        params = prof_mod.TransformParams.plane()
    t = args.at
    if args.op == "F":
        val = p.F(t)
    elif args.op == "Fk":
        val = prof_mod.forward_map(p, params, t)
    elif args.op == "U":
        val = p.U(t)
    elif args.op == "Uk":
        val = prof_mod.inverse_map(p, params, t)
    elif args.op == "g":
        val = prof_mod.synth_g(p, params, t)
    elif args.op == "G":
        g = lambda s: prof_mod.synth_g(p, params, s)
        val = prof_mod.ViscTransform(p, g, p.C0, p.C0)(t)
    else:
        raise ValueError(f"unknown op {args.op!r}")
    print(repr(float(val)))
    return 0


def build_parser():
    ap = argparse.ArgumentParser(prog="isopara",
                                 description="isoparametric field toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("synthesize", help="write a canonical field and samples")
    s.add_argument("--spec", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--samples", type=int, default=0)
    s.add_argument("--seed", type=int, default=_default_seed())
    s.add_argument("--csv")
    s.set_defaults(fn=_cmd_synthesize)

    s = sub.add_parser("classify", help="classify a field at a probe point")
    s.add_argument("--field", required=True)
    s.add_argument("--at", required=True)
    s.add_argument("--mode", choices=["analytic", "fd"])
    s.add_argument("--h", type=float)
    s.add_argument("--tol", type=float, default=DEFAULT_TOL)
    s.add_argument("--group-tol", type=float, dest="group_tol")
    s.add_argument("--tol-zero", type=float, dest="tol_zero")
    s.add_argument("--report")
    s.set_defaults(fn=_cmd_classify)

    s = sub.add_parser("verify", help="run a verification suite")
    s.add_argument("--field", required=True)
    s.add_argument("--suite", required=True,
                   choices=["flow", "hessian-evolution", "harmonic",
                            "isoparametric", "cartan"])
    s.add_argument("--at")
    s.add_argument("--tol", type=float, default=1e-6)
    s.add_argument("--seed", type=int, default=_default_seed())
    s.add_argument("--report")
    s.set_defaults(fn=_cmd_verify)

    s = sub.add_parser("invert-moments", help="recover eigenvalues from moments")
    s.add_argument("--C", required=True)
    s.add_argument("--d", required=True)
    s.add_argument("--guess")
    s.set_defaults(fn=_cmd_invert_moments)

    s = sub.add_parser("profile", help="evaluate a profile transform")
    s.add_argument("--spec", required=True)
    s.add_argument("--op", required=True,
                   choices=["F", "Fk", "U", "Uk", "g", "G"])
    s.add_argument("--k", type=int, default=2)
    s.add_argument("--C1", type=float, default=0.0)
    s.add_argument("--at", type=float, required=True)
    s.set_defaults(fn=_cmd_profile)
    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except (IsoparError, ValueError, TypeError, KeyError, OSError,
            json.JSONDecodeError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
