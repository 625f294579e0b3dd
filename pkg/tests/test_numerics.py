import numpy as np

from isopara.numerics import CachedAntiderivative, gauss_quad, invert_increasing


def test_gauss_quad_smooth():
    val = gauss_quad(np.sin, 0.0, np.pi)
    assert abs(val - 2.0) <= 1e-13
    assert abs(gauss_quad(lambda x: x**3, -1.0, 2.0) - 15.0 / 4.0) <= 1e-12


def test_gauss_quad_reversed_interval():
    assert abs(gauss_quad(np.exp, 1.0, 0.0) + (np.e - 1.0)) <= 1e-12


def test_cached_antiderivative_matches_closed_form():
    F = CachedAntiderivative(np.cos, anchor=0.0, step=0.05)
    for t in [-2.0, -0.3, 0.0, 0.7, 3.1]:
        assert abs(F(t) - np.sin(t)) <= 1e-12
    t = np.linspace(-1.0, 1.0, 11)
    assert np.allclose(F(t), np.sin(t), atol=1e-12)


def test_invert_increasing():
    F = lambda t: np.asarray(t) ** 3
    s = np.array([0.001, 1.0, 8.0, 20.0])
    t = invert_increasing(F, s, np.zeros(4), np.full(4, 3.0),
                          f=lambda t: 1.0 / (3.0 * np.asarray(t) ** 2))
    assert np.allclose(t, s ** (1.0 / 3.0), atol=1e-10)
