import numpy as np
import pytest

from gen import base_probe, batched_residuals, random_field
from isopara import fields as flds
from isopara import spectral
from isopara.errors import (
    AxisTooClose,
    CriticalPoint,
    InvalidSpec,
    RankOutOfRange,
    StepTooSmall,
)
from isopara.profile import ConstantProfile


def unit_profile(C0=0.0):
    return ConstantProfile(a=1.0, C0=C0)


def sphere3():
    """u(x) = |x| in R^3 (base level |x| = 2)."""
    return flds.make_cylinder(np.eye(3), np.zeros(3), 3, 1.0, unit_profile(2.0))


def test_random_projection_edges():
    assert np.array_equal(flds.random_projection(4, 4, 0).matrix, np.eye(4))
    assert np.array_equal(flds.random_projection(4, 0, 0).matrix,
                          np.zeros((4, 4)))
    with pytest.raises(RankOutOfRange):
        flds.random_projection(3, 5, 0)


def test_random_projection_invariants():
    for seed in range(20):
        R = flds.random_projection(5, 2, seed).matrix
        assert abs(np.trace(R) - 2.0) <= 1e-12
        assert np.linalg.norm(R @ R - R) <= 1e-12
        assert np.linalg.norm(R - R.T) <= 1e-14
        # deterministic per seed
        assert np.array_equal(R, flds.random_projection(5, 2, seed).matrix)


def test_make_field_validation():
    p = unit_profile()
    with pytest.raises(InvalidSpec):
        flds.make_plane([1.0, 1.0], [0.0, 0.0], p)  # not unit
    with pytest.raises(InvalidSpec):
        flds.make_cylinder(np.eye(3), np.zeros(3), 1, 1.0, p)  # k < 2
    with pytest.raises(InvalidSpec):
        flds.make_cylinder(np.eye(3), np.zeros(3), 3, -1.0, p)  # C1 <= 0
    with pytest.raises(InvalidSpec):
        flds.make_cylinder(np.ones((3, 3)), np.zeros(3), 2, 1.0, p)


def test_plane_evaluation():
    fld = flds.make_plane([1.0, 0.0, 0.0], np.zeros(3), unit_profile())
    X = np.array([[0.3, 1.0, -2.0], [1.5, 0.0, 0.0]])
    assert np.allclose(flds.evaluate(fld, X), [0.3, 1.5], atol=1e-14)
    j = flds.analytic_jet(fld, np.array([0.7, 1.0, 2.0]))
    assert np.array_equal(j.grad, [1.0, 0.0, 0.0])
    assert np.array_equal(j.hess, np.zeros((3, 3)))


def test_sphere_jet_closed_form():
    fld = sphere3()
    x = np.array([2.0, 0.0, 0.0])
    j = flds.analytic_jet(fld, x)
    assert abs(j.u - 2.0) <= 1e-14
    assert np.allclose(j.grad, [1.0, 0.0, 0.0], atol=1e-14)
    assert np.allclose(j.hess, np.diag([0.0, 0.5, 0.5]), atol=1e-14)


def test_circular_cylinder_field():
    R0 = np.diag([1.0, 1.0, 0.0])
    fld = flds.make_cylinder(R0, np.zeros(3), 2, 1.0, unit_profile(1.0))
    x = np.array([3.0, 4.0, 7.0])
    assert abs(flds.evaluate(fld, x[None, :])[0] - 5.0) <= 1e-12


def test_axis_exclusion():
    fld = sphere3()
    with pytest.raises(AxisTooClose):
        flds.analytic_jet(fld, np.zeros(3))


def test_fd_matches_analytic():
    rng = np.random.default_rng(13)
    for _ in range(20):
        fld = random_field(rng)
        x = base_probe(fld, rng)
        ja = flds.analytic_jet(fld, x)
        jf = flds.jet(fld, x, mode="fd", h=1e-4)
        assert np.max(np.abs(jf.grad - ja.grad)) <= 1e-7
        assert np.max(np.abs(jf.hess - ja.hess)) <= 1e-5


def test_fd_step_guard():
    fld = sphere3()
    with pytest.raises(StepTooSmall):
        flds.jet(fld, np.array([2.0, 0.0, 0.0]), mode="fd", h=1e-14)


def test_operators_plane_unit():
    fld = flds.make_plane([0.6, -0.8], np.zeros(2), unit_profile())
    ops = flds.operators(flds.analytic_jet(fld, np.array([1.0, 1.0])))
    assert ops.gradnorm == 1.0
    assert ops.laplacian == 0.0
    assert ops.ninf == 0.0
    assert ops.onelap == 0.0
    assert np.array_equal(ops.hess_v, np.zeros((2, 2)))


def test_operators_sphere():
    ops = flds.operators(flds.analytic_jet(sphere3(), np.array([2.0, 0, 0])))
    assert abs(ops.gradnorm - 1.0) <= 1e-14
    assert abs(ops.laplacian - 1.0) <= 1e-14
    assert abs(ops.ninf) <= 1e-14
    assert abs(ops.onelap - 1.0) <= 1e-14


def test_operators_quadratic_control():
    # u = |x|^2: gradnorm 2|x|, laplacian 2n, ninf 2, onelap (2n-2)/(2|x|)
    u = lambda X: np.sum(np.asarray(X) ** 2, axis=-1)
    x = np.array([1.0, 2.0, 2.0])
    j = flds.fd_jet(u, x, 1e-5)
    ops = flds.operators(j)
    assert abs(ops.gradnorm - 6.0) <= 1e-8
    assert abs(ops.laplacian - 6.0) <= 1e-5
    assert abs(ops.ninf - 2.0) <= 1e-6
    assert abs(ops.onelap - 4.0 / 6.0) <= 1e-6


def test_operators_critical_point():
    u = lambda X: np.sum(np.asarray(X) ** 2, axis=-1)
    j = flds.fd_jet(u, np.zeros(3), 1e-5)
    with pytest.raises(CriticalPoint):
        flds.operators(j)


def test_operators_invariants_random():
    rng = np.random.default_rng(17)
    for _ in range(30):
        fld = random_field(rng)
        x = base_probe(fld, rng)
        ops = flds.operators(flds.analytic_jet(fld, x))
        assert abs(ops.onelap * ops.gradnorm
                   - (ops.laplacian - ops.ninf)) <= 1e-10
        assert abs(np.trace(ops.hess_v) - ops.onelap) <= 1e-8
        nhat = flds.analytic_jet(fld, x).grad / ops.gradnorm
        assert np.linalg.norm(ops.hess_v @ nhat) <= 1e-8


def test_hess_v_cylinder_spectrum():
    rng = np.random.default_rng(19)
    for _ in range(10):
        fld = random_field(rng, kind="cylinder")
        x = base_probe(fld, rng)
        v, _, Hv = flds.v_jet(fld, x)
        dec = spectral.sym_eig(Hv)
        expect = fld.c1 / (1.0 + fld.c1 * v)
        nz = [i for i in range(dec.s) if abs(dec.kappas[i]) > 1e-9]
        assert len(nz) == (1 if fld.k > 1 else 0)
        i = nz[0]
        assert abs(dec.kappas[i] - expect) <= 1e-10
        assert dec.mults[i] == fld.k - 1
        zero = [j for j in range(dec.s) if j != i]
        assert sum(dec.mults[j] for j in zero) == fld.n - fld.k + 1


def test_synthesis_residuals_sample():
    rng = np.random.default_rng(23)
    for _ in range(20):
        fld = random_field(rng)
        X = flds.sample_points(fld, 50, rng)
        res_grad, res_lap = batched_residuals(fld, X)
        assert res_grad <= 1e-10
        assert res_lap <= 1e-8


def test_field_json_round_trip():
    rng = np.random.default_rng(29)
    for _ in range(10):
        fld = random_field(rng)
        fld2 = flds.make_field(flds.field_to_dict(fld))
        x = base_probe(fld, rng)[None, :]
        assert np.allclose(flds.evaluate(fld, x), flds.evaluate(fld2, x),
                           atol=1e-12)


def test_grid_field_round_trip(tmp_path):
    fld = sphere3()
    path = str(tmp_path / "grid.csv")
    origin = np.array([1.0, -1.0, -1.0])
    spacing = np.array([0.1, 0.1, 0.1])
    shape = (25, 21, 21)
    flds.GridField.write(path, origin, spacing, shape, flds.as_callable(fld))
    grid = flds.GridField.read(path)
    pts = np.array([[2.0, 0.0, 0.0], [2.2, 0.3, -0.1]])
    exact = flds.evaluate(fld, pts)
    assert np.max(np.abs(grid(pts) - exact)) <= 1e-5
