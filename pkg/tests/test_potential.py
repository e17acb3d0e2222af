import numpy as np
import pytest

from pmkdv.errors import ConfigError
from pmkdv.potential import PotentialSpec, Term, constant, linear, preset


def test_preset_values_at_origin():
    assert np.isclose(preset("paper-v1")(0.0), -10.0)
    assert np.isclose(preset("paper-v2")(0.0), 8.0)
    assert preset("zero")(1.3) == 0.0


def test_unknown_preset():
    with pytest.raises(ConfigError):
        preset("nope")


def test_term_validation():
    with pytest.raises(ValueError):
        Term(1.0, "tan", 1.0)
    assert Term(1.0, "cos^2", 2.0) == Term(1.0, "cos2", 2.0)


@pytest.mark.parametrize("name", ["paper-v1", "paper-v2"])
def test_derivative_matches_finite_differences(name):
    V = preset(name)
    x = np.linspace(-3, 3, 101)
    h = 1e-6
    fd = (V(x + h) - V(x - h)) / (2 * h)
    assert np.max(np.abs(fd - V.eval_derivative(x))) < 1e-6


def test_bounds_dominate_samples():
    V = preset("paper-v1")
    x = np.linspace(-10, 10, 20001)
    assert np.max(np.abs(V(x))) <= V.sup_bound() + 1e-12
    assert np.max(np.abs(V.eval_derivative(x))) <= V.sup_derivative_bound() + 1e-12
    assert V.c1_bound() == V.sup_bound() + V.sup_derivative_bound()


def test_periodicity_on_rescaled_domain():
    for name in ("paper-v1", "paper-v2"):
        V = preset(name)
        assert V.is_periodic(2 * np.pi)
        V.validate_periodic(np.pi)
    with pytest.raises(ConfigError):
        PotentialSpec((Term(1.0, "sin", 0.7),)).validate_periodic(np.pi)


def test_linear_is_unbounded():
    assert not linear(2.0).bounded
    assert constant(3.0).bounded
    assert np.allclose(constant(3.0)(np.arange(4.0)), 3.0)


def test_rescaling():
    V = preset("paper-v2")
    W = V.rescaled(0.5)
    x = np.linspace(-2, 2, 9)
    assert np.allclose(W(x), V(0.5 * x))


def test_dict_round_trip():
    V = preset("paper-v1")
    assert PotentialSpec.from_dict(V.to_dict()) == V
    assert PotentialSpec.from_dict("paper-v2") == preset("paper-v2")
    assert PotentialSpec.from_dict({"preset": "zero"}) == preset("zero")
