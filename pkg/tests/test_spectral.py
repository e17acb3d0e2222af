import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays
from scipy import integrate

from pmkdv.checks import brute_force_cube
from pmkdv.errors import MeanNotZero
from pmkdv.soliton import sech
from pmkdv.spectral import (Grid, antiderivative, dealiased_cube, forward, h1_norm, inner,
                            inverse, l2_norm, periodic_distance, quadrature,
                            spectral_derivative, symplectic_form, weighted_h1_norm)

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


@pytest.mark.parametrize("n", [0, 15, 48, 100])
def test_grid_rejects_bad_sizes(n):
    with pytest.raises(ValueError):
        Grid(n, 1.0)


def test_grid_rejects_bad_length():
    with pytest.raises(ValueError):
        Grid(64, 0.0)


def test_grid_layout():
    g = Grid(16, 2.0)
    assert g.x[0] == -2.0
    assert np.isclose(g.x[1] - g.x[0], g.dx)
    assert np.isclose(g.k_max, np.pi * 16 / 4.0)
    assert g.kr.shape == (9,)


def test_forward_coefficients_match_exponentials():
    g = Grid(32, 3.0)
    k = 2 * np.pi / g.length * 3
    F = forward(g, np.exp(1j * k * g.x).real)
    # cos = (e^{ikx} + e^{-ikx}) / 2
    assert np.isclose(F[3], 0.5)
    assert np.isclose(F[-3], 0.5)
    assert np.sum(np.abs(F) > 1e-12) == 2


@settings(max_examples=40, deadline=None)
@given(arrays(float, 64, elements=finite))
def test_round_trip_and_parseval(u):
    g = Grid(64, 5.0)
    F = forward(g, u)
    assert np.allclose(inverse(g, F), u, atol=1e-12)
    assert np.isclose(quadrature(g, u * u), g.length * np.sum(np.abs(F) ** 2),
                      rtol=1e-12, atol=1e-12)


@pytest.mark.parametrize("order,expected", [
    (1, lambda x: 3 * np.cos(3 * x)),
    (2, lambda x: -9 * np.sin(3 * x)),
    (3, lambda x: -27 * np.cos(3 * x)),
])
def test_derivatives_of_sine(small_grid, order, expected):
    d = spectral_derivative(small_grid, np.sin(3 * small_grid.x), order)
    assert np.max(np.abs(d - expected(small_grid.x))) < 1e-10


def test_derivative_of_sech_against_closed_form():
    g = Grid(2048, 40.0)
    x = g.x
    d = spectral_derivative(g, sech(x), 1)
    assert np.max(np.abs(d + sech(x) * np.tanh(x))) < 1e-10


def test_odd_derivative_drops_nyquist():
    g = Grid(16, np.pi)
    alt = (-1.0) ** np.arange(16)
    assert np.max(np.abs(spectral_derivative(g, alt, 1))) < 1e-12
    assert np.max(np.abs(spectral_derivative(g, alt, 3))) < 1e-12


def test_derivative_order_validated(small_grid):
    with pytest.raises(ValueError):
        spectral_derivative(small_grid, small_grid.x, 4)


def test_antiderivative_inverts_derivative(small_grid):
    x = small_grid.x
    f = np.cos(2 * x) + 0.3 * np.sin(5 * x)
    F = antiderivative(small_grid, f)
    assert np.max(np.abs(spectral_derivative(small_grid, F, 1) - f)) < 1e-12
    assert abs(quadrature(small_grid, F)) < 1e-12


def test_antiderivative_refuses_mean(small_grid):
    with pytest.raises(MeanNotZero):
        antiderivative(small_grid, 1.0 + np.cos(small_grid.x))


def test_dealiased_cube_matches_brute_force():
    g = Grid(32, 2.0)
    rng = np.random.default_rng(7)
    u = rng.standard_normal(32)
    assert np.max(np.abs(dealiased_cube(g, u) - brute_force_cube(g, u))) < 1e-12


@settings(max_examples=10, deadline=None)
@given(arrays(float, 32, elements=st.floats(-2, 2)))
def test_dealiased_cube_property(u):
    g = Grid(32, 1.0)
    ref = brute_force_cube(g, u)
    assert np.max(np.abs(dealiased_cube(g, u) - ref)) < 1e-10 * max(1.0, np.max(np.abs(ref)))


def test_dealiased_cube_exact_for_band_limited(small_grid):
    # modes up to 5 cube to modes up to 15 < 32: no truncation at all
    x = small_grid.x
    u = np.cos(x) + 0.5 * np.sin(5 * x)
    assert np.max(np.abs(dealiased_cube(small_grid, u) - u**3)) < 1e-12


def test_quadrature_against_scipy_oracles(wide_grid):
    x = wide_grid.x
    assert abs(quadrature(wide_grid, sech(x)) - integrate.quad(sech, -np.inf, np.inf)[0]) < 1e-8
    two = integrate.quad(lambda y: sech(y) ** 2, -np.inf, np.inf)[0]
    assert abs(quadrature(wide_grid, sech(x) ** 2) - two) < 1e-12
    assert np.isclose(two, 2.0)
    y2 = integrate.quad(lambda y: y * y * sech(y) ** 2, -np.inf, np.inf)[0]
    assert abs(quadrature(wide_grid, x * x * sech(x) ** 2) - y2) < 1e-10
    assert np.isclose(y2, np.pi**2 / 6)


def test_norms(small_grid):
    x = small_grid.x
    f = np.sin(2 * x)
    assert np.isclose(l2_norm(small_grid, f), np.sqrt(np.pi))
    assert np.isclose(h1_norm(small_grid, f), np.sqrt(5 * np.pi))
    assert np.isclose(inner(small_grid, f, np.cos(2 * x)), 0.0, atol=1e-14)


def test_weighted_norm_reduces_to_h1_at_zero_decay(small_grid):
    f = np.sin(3 * small_grid.x)
    assert np.isclose(weighted_h1_norm(small_grid, f, 0.4, 1e-14), h1_norm(small_grid, f))
    assert weighted_h1_norm(small_grid, f, 0.4, 1.0) < h1_norm(small_grid, f)


def test_periodic_distance_wraps():
    g = Grid(16, 1.0)
    d = periodic_distance(g, np.array([0.9, -0.9, 0.0]), -0.95)
    assert np.allclose(d, [-0.15, 0.05, 0.95])


def test_symplectic_form_antisymmetric(small_grid):
    x = small_grid.x
    v1, v2 = np.sin(x), np.cos(3 * x) + np.sin(2 * x)
    assert np.isclose(symplectic_form(small_grid, v1, v2), -symplectic_form(small_grid, v2, v1))
