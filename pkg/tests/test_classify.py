import numpy as np
import pytest

from gen import base_probe, random_field
from isopara import classify as _pkg  # noqa: F401  (keeps import style uniform)
from isopara import fields as flds
from isopara.classify import (
    classify,
    estimate_profile,
    isoparametric_check,
    verify_reconstruction,
)
from isopara.errors import CriticalPoint
from isopara.profile import ConstantProfile


def unit_profile(C0=0.0):
    return ConstantProfile(a=1.0, C0=C0)


def sphere3():
    return flds.make_cylinder(np.eye(3), np.zeros(3), 3, 1.0, unit_profile(2.0))


def test_estimate_profile_plane():
    fld = flds.make_plane([1.0, 0.0], np.zeros(2), unit_profile())
    prof = estimate_profile(fld, np.array([0.0, 3.0]), 1.0)
    ts = np.linspace(prof.interval[0] + 1e-6, prof.interval[1] - 1e-6, 20)
    assert np.max(np.abs(prof.f(ts) - 1.0)) <= 1e-8


def test_estimate_profile_radial():
    prof = estimate_profile(sphere3(), np.array([2.0, 0.0, 0.0]), 1.0)
    assert abs(prof.interval[0] - 2.0) <= 1e-8
    assert abs(prof.interval[1] - 3.0) <= 1e-6
    ts = np.linspace(2.01, 2.99, 20)
    assert np.max(np.abs(prof.f(ts) - 1.0)) <= 1e-7


def test_estimate_profile_synthesized():
    from isopara.profile import PowerProfile
    fld = flds.make_plane([0.0, 1.0], np.zeros(2), PowerProfile(1.0, 1.0, 2.0))
    prof = estimate_profile(fld, np.array([5.0, 0.0]), 0.4, steps=128)
    ts = np.linspace(prof.interval[0] + 1e-3, prof.interval[1] - 1e-3, 30)
    assert np.max(np.abs(prof.f(ts) - ts)) <= 1e-6


def test_classify_affine_plane():
    u = lambda X: 3.0 * np.asarray(X)[..., 0] - 4.0 * np.asarray(X)[..., 1]
    rep = classify(u, np.array([0.2, -0.4]), with_reconstruction=False)
    assert rep.case == "plane"
    assert not rep.negated
    assert np.allclose(rep.q, [0.6, -0.8], atol=1e-7)
    assert rep.C1 == 0.0


def test_classify_sphere():
    rep = classify(sphere3(), np.array([2.0, 0.0, 0.0]))
    assert rep.case == "cylinder"
    assert rep.k == 3
    assert abs(rep.c1 - 0.5) <= 1e-12
    assert abs(rep.C1 - 1.0) <= 1e-12
    assert np.allclose(rep.R0, np.eye(3), atol=1e-10)
    assert np.linalg.norm(rep.x_star) <= 1e-10
    assert rep.residuals["recon_max"] <= 1e-8


def test_classify_circular_cylinder():
    R0 = np.diag([1.0, 1.0, 0.0])
    fld = flds.make_cylinder(R0, np.zeros(3), 2, 1.0, unit_profile(1.0))
    rep = classify(fld, np.array([1.0, 0.0, 5.0]), with_reconstruction=False)
    assert rep.case == "cylinder"
    assert rep.k == 2
    assert np.allclose(rep.R0, R0, atol=1e-10)
    assert np.linalg.norm(rep.R0 @ rep.x_star) <= 1e-10


def test_classify_quadratic_critical():
    u = lambda X: np.sum(np.asarray(X) ** 2, axis=-1)
    with pytest.raises(CriticalPoint):
        classify(u, np.zeros(3))


def test_classify_negated_cylinder():
    fld = sphere3()
    u = lambda X: -flds.evaluate(fld, X)
    rep = classify(u, np.array([2.0, 0.0, 0.0]), with_reconstruction=False)
    assert rep.case == "cylinder"
    assert rep.negated
    assert rep.k == 3
    assert abs(rep.c1 - 0.5) <= 1e-5


def test_classify_reject_two_curvatures():
    # product-of-distances style field: level sets curve differently in
    # the two blocks, so Hv has two distinct nonzero clusters
    def u(X):
        X = np.asarray(X)
        a = np.sqrt(X[..., 0] ** 2 + X[..., 1] ** 2)
        b = np.sqrt(X[..., 2] ** 2 + X[..., 3] ** 2)
        return a + 0.5 * b
    rep = classify(u, np.array([1.0, 0.0, 2.0, 0.0]),
                   with_reconstruction=False)
    assert rep.case == "reject"
    assert "cartan" in rep.diagnostics


def test_round_trip_random_fields():
    rng = np.random.default_rng(31)
    for _ in range(25):
        fld = random_field(rng)
        x0 = base_probe(fld, rng)
        rep = classify(fld, x0, with_reconstruction=False)
        if fld.kind == "plane":
            assert rep.case == "plane"
            assert abs(rep.q @ fld.q) >= 1.0 - 1e-10
        else:
            assert rep.case == "cylinder"
            assert rep.k == fld.k
            assert abs(rep.c1 - fld.c1) <= 1e-8
            assert np.linalg.norm(rep.R0 - fld.R0) <= 1e-7
            assert np.linalg.norm(fld.R0 @ (rep.x_star - fld.x_star)) <= 1e-6
            # canonical gauge: x_star lies in the probe's normal line
            assert np.linalg.norm(
                (np.eye(fld.n) - rep.R0) @ (rep.x_star - x0)) <= 1e-8


def test_verify_reconstruction_self_consistency():
    fld = sphere3()
    x0 = np.array([2.0, 0.0, 0.0])
    rep = classify(fld, x0, with_reconstruction=False)
    rng = np.random.default_rng(0)
    samples = x0 + 0.1 * rng.standard_normal((16, 3))
    out = verify_reconstruction(rep, fld, samples, mode="analytic")
    assert out["recon_max"] <= 1e-8
    assert out["semiexp_max"] <= 1e-8


def test_reconstruction_residual_scales_with_noise():
    fld = sphere3()
    x0 = np.array([2.0, 0.0, 0.0])
    rng = np.random.default_rng(1)
    samples = x0 + 0.1 * rng.standard_normal((16, 3))
    resids = []
    for delta in [1e-6, 1e-5]:
        bump = lambda X, d=delta: flds.evaluate(fld, X) + d * np.sin(
            3.0 * np.asarray(X)[..., 1])
        # widen grouping: the perturbation splits the curvature cluster
        rep = classify(bump, x0, group_tol=1e-3, with_reconstruction=False)
        out = verify_reconstruction(rep, bump, samples)
        resids.append(out["recon_max"])
    assert 2.0 <= resids[1] / resids[0] <= 50.0


def test_isoparametric_check_true():
    rng = np.random.default_rng(2)
    fld = sphere3()
    pts = flds.sample_points(fld, 40, rng)
    out = isoparametric_check(fld, pts, tol=1e-9)
    assert out["isoparametric"]


def test_isoparametric_check_false():
    u = lambda X: np.asarray(X)[..., 0] + np.asarray(X)[..., 1] ** 2
    pts = np.array([[0.0, 0.0], [-1.0, 1.0], [-4.0, 2.0]])  # equal u = 0
    out = isoparametric_check(u, pts, tol=1e-6)
    assert not out["isoparametric"]
    assert out["bins"][0]["gradnorm_spread"] > 0.5


def test_isoparametric_check_laplacian_spread():
    # distance to a circle vs distance to a line, glued across y = 0:
    # |grad u| = 1 on both branches but the mean curvature differs
    circ = lambda X: np.sqrt(np.asarray(X)[..., 0] ** 2
                             + np.asarray(X)[..., 1] ** 2)
    line = lambda X: np.asarray(X)[..., 0]
    mix = lambda X: np.where(np.asarray(X)[..., 1] >= 0.0, circ(X), line(X))
    pts = np.array([
        [1.0, 2.0],  # circle branch, u = sqrt(5)
        [2.236067977499790, -1.0],  # line branch, u = sqrt(5)
    ])
    out = isoparametric_check(mix, pts, tol=1e-3, tol_g=1e-3)
    assert not out["isoparametric"]
    assert out["bins"][0]["laplacian_spread"] > 0.1
