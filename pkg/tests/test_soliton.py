import numpy as np
import pytest
from scipy import integrate

from pmkdv.diagnostics import conserved
from pmkdv.errors import TailTruncationWarning
from pmkdv.soliton import (SolitonParams, d_a_eta, d_c_eta, eta, invariants_on_soliton, sech,
                           symplectic_pairings)
from pmkdv.spectral import Grid, spectral_derivative, symplectic_form


def test_params_validation():
    with pytest.raises(ValueError):
        SolitonParams(0.0, 0.0)
    with pytest.raises(ValueError):
        SolitonParams(np.nan, 1.0)
    assert np.array_equal(SolitonParams(1.0, 2.0).as_array(), [1.0, 2.0])


def test_sech_no_overflow():
    assert sech(1000.0) == 0.0
    assert np.isclose(sech(0.3), 1 / np.cosh(0.3))


def test_profile_peak_and_periodic_centre():
    g = Grid(512, 20.0)
    u = eta(g, SolitonParams(19.0, 2.0))
    assert np.isclose(u.max(), 2.0 * sech(2.0 * np.min(np.abs(g.x - 19.0))))
    # a and a + 2l are the same soliton
    assert np.allclose(u, eta(g, SolitonParams(19.0 - 40.0, 2.0)))


@pytest.mark.parametrize("c", [0.5, 1.0, 2.0])
def test_invariants_against_quad(c):
    # oracles: int sech = pi, int sech^2 = 2, int sech^2 tanh^2 = 2/3, int sech^4 = 4/3
    m = integrate.quad(lambda y: sech(y), -np.inf, np.inf)[0]
    p = 0.5 * c * integrate.quad(lambda y: sech(y) ** 2, -np.inf, np.inf)[0]
    h = 0.5 * c**3 * integrate.quad(
        lambda y: (sech(y) * np.tanh(y)) ** 2 - sech(y) ** 4, -np.inf, np.inf)[0]
    assert np.allclose(invariants_on_soliton(SolitonParams(0.0, c)), (m, p, h), atol=1e-9)
    g = Grid(2048, 60.0 / c)
    assert np.allclose(conserved(g, eta(g, SolitonParams(0.5, c))), (m, p, h), atol=1e-8)


@pytest.mark.parametrize("which,h", [("a", 1e-5), ("c", 1e-5)])
def test_parameter_derivatives_match_finite_differences(which, h):
    g = Grid(1024, 30.0)
    p = SolitonParams(0.7, 1.3)
    if which == "a":
        fd = (eta(g, SolitonParams(p.a + h, p.c)) - eta(g, SolitonParams(p.a - h, p.c))) / (2 * h)
        exact = d_a_eta(g, p)
    else:
        fd = (eta(g, SolitonParams(p.a, p.c + h)) - eta(g, SolitonParams(p.a, p.c - h))) / (2 * h)
        exact = d_c_eta(g, p)
    assert np.max(np.abs(fd - exact)) < 1e-8


def test_d_a_is_minus_spatial_derivative():
    g = Grid(1024, 30.0)
    p = SolitonParams(-1.0, 1.0)
    assert np.max(np.abs(d_a_eta(g, p) + spectral_derivative(g, eta(g, p), 1))) < 1e-10


def test_pairings_invert_J():
    g = Grid(2048, 30.0)
    p = SolitonParams(0.2, 1.1)
    pair = symplectic_pairings(g, p)
    assert np.max(np.abs(spectral_derivative(g, pair.j_inv_da, 1) - d_a_eta(g, p))) < 1e-9
    assert np.max(np.abs(spectral_derivative(g, pair.j_inv_dc, 1) - d_c_eta(g, p))) < 1e-9


def test_symplectic_normalisation():
    g = Grid(2048, 30.0)
    p = SolitonParams(0.0, 1.0)
    assert abs(symplectic_form(g, d_a_eta(g, p), d_c_eta(g, p)) - 1.0) < 1e-8


def test_tail_warning_on_narrow_domain():
    import pmkdv.soliton as sol
    g = Grid(32, 1.5)
    sol._warned_grids.discard(g)
    with pytest.warns(TailTruncationWarning):
        eta(g, SolitonParams(0.0, 1.0))
