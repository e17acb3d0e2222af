import numpy as np
import pytest
from scipy import integrate as sp_int

from pmkdv.effective import (EffectiveConfig, bracket_vee, bracket_vxe, integrate, rhs,
                             scale_drift_bound)
from pmkdv.errors import ConfigError, ScaleCollapse
from pmkdv.potential import constant, linear, preset
from pmkdv.soliton import SolitonParams, sech


def test_free_flow_is_linear():
    tr = integrate(EffectiveConfig(0.0, preset("zero"), 1e-2, 3.0), SolitonParams(0.5, 1.0))
    assert abs(tr.a[-1] - 3.5) < 1e-12
    assert np.all(tr.c == 1.0)


@pytest.mark.parametrize("p", [SolitonParams(0.3, 1.0), SolitonParams(-1.2, 2.5)])
def test_brackets_against_quad(p):
    V = preset("paper-v1")
    e2 = lambda x: (p.c * sech(p.c * (x - p.a))) ** 2
    vee = sp_int.quad(lambda x: V(x) * e2(x), p.a - 40 / p.c, p.a + 40 / p.c, limit=500)[0]
    vxe = sp_int.quad(lambda x: V(x) * (x - p.a) * e2(x), p.a - 40 / p.c, p.a + 40 / p.c,
                      limit=500)[0]
    assert abs(bracket_vee(V, p) - vee) < 1e-9
    assert abs(bracket_vxe(V, p) - vxe) < 1e-9


def test_constant_potential_brackets():
    p = SolitonParams(0.0, 1.7)
    assert np.isclose(bracket_vee(constant(2.0), p), 2.0 * 2 * p.c)
    assert abs(bracket_vxe(constant(2.0), p)) < 1e-14
    # <x eta, x eta> slope: int y^2 sech^2 / c = pi^2 / (6 c)
    assert np.isclose(bracket_vxe(linear(1.0), p), np.pi**2 / (6 * p.c))


def test_constant_potential_closed_form():
    kappa, eps, T = -0.7, 0.05, 4.0
    tr = integrate(EffectiveConfig(eps, constant(kappa), 1e-2, T), SolitonParams(0.0, 1.0))
    assert abs(tr.c[-1] - np.exp(2 * eps * kappa * T)) < 1e-9


def test_rk4_order_on_constant_potential():
    kappa, eps, T = -0.7, 0.5, 2.0
    exact = np.exp(2 * eps * kappa * T)
    errs = [abs(integrate(EffectiveConfig(eps, constant(kappa), dt, T),
                          SolitonParams(0.0, 1.0)).c[-1] - exact) for dt in (0.1, 0.05)]
    assert 12 <= errs[0] / errs[1] <= 20


def test_reversibility():
    cfg = EffectiveConfig(0.05, preset("paper-v2"), 1e-3, 2.0)
    fwd = integrate(cfg, SolitonParams(0.1, 1.0))
    back = integrate(EffectiveConfig(0.05, preset("paper-v2"), -1e-3, 2.0),
                     SolitonParams(fwd.a[-1], fwd.c[-1]), t0=2.0)
    assert abs(back.a[-1] - 0.1) < 1e-10 and abs(back.c[-1] - 1.0) < 1e-10
    assert np.isclose(back.t[-1], 0.0)


def test_scale_drift_bound_holds():
    cfg = EffectiveConfig(0.05, preset("paper-v1"), 1e-2, 3.0)
    tr = integrate(cfg, SolitonParams(0.0, 1.0))
    assert np.all(np.abs(tr.c - tr.c[0]) <= scale_drift_bound(cfg, tr) + 1e-14)


def test_scale_collapse():
    with pytest.raises(ScaleCollapse) as exc:
        integrate(EffectiveConfig(1.0, constant(-5.0), 1e-2, 10.0), SolitonParams(0.0, 1.0))
    assert exc.value.c is not None
    with pytest.raises(ScaleCollapse):
        rhs(EffectiveConfig(1.0, constant(1.0)), SolitonParams(0.0, 1e-4))


def test_stride_sampling():
    tr = integrate(EffectiveConfig(0.01, preset("paper-v1"), 1e-2, 1.05, stride=10),
                   SolitonParams(0.0, 1.0))
    assert len(tr) == 12 and np.isclose(tr.t[-1], 1.05)
    assert set(tr.columns) == {"bracket_vee", "bracket_vxe"}


@pytest.mark.parametrize("kw", [{"epsilon": -1.0}, {"dt": 0.0}, {"t_final": -1.0},
                                {"stride": 0}, {"bracket_points": 4}])
def test_config_validation(kw):
    with pytest.raises(ConfigError):
        EffectiveConfig(**kw)
