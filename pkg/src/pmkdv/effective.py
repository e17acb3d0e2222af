"""Effective ODEs for the soliton parameters.

    a' = c^2 + eps * <V eta, (x - a) eta> / c
    c' = eps * <V eta, eta>

Both brackets are integrated in the scaled variable ``y = c (x - a)``:

    <V eta, eta>         = c * int V(a + y/c) sech(y)^2 dy
    <V eta, (x - a) eta> =     int V(a + y/c) y sech(y)^2 dy
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import ConfigError, ScaleCollapse
from .potential import PotentialSpec
from .soliton import SolitonParams
from .trajectory import Trajectory

EFFECTIVE_COLUMNS = ("t", "a", "c", "bracket_vee", "bracket_vxe")


@dataclass(frozen=True)
class EffectiveConfig:
    epsilon: float = 0.0
    potential: PotentialSpec = field(default_factory=PotentialSpec)
    dt: float = 1e-3
    t_final: float = 1.0
    bracket_window: float = 40.0
    bracket_points: int = 2048
    c_floor: float = 1e-3
    stride: int = 1

    def __post_init__(self):
        if not (np.isfinite(self.epsilon) and self.epsilon >= 0):
            raise ConfigError(f"epsilon must be >= 0, got {self.epsilon}")
        if not (np.isfinite(self.dt) and self.dt != 0):
            raise ConfigError(f"dt must be finite and nonzero, got {self.dt}")
        if not (np.isfinite(self.t_final) and self.t_final >= 0):
            raise ConfigError(f"t_final must be >= 0, got {self.t_final}")
        if self.bracket_window <= 0 or self.bracket_points < 16:
            raise ConfigError("bracket_window must be positive and bracket_points >= 16")
        if int(self.stride) != self.stride or self.stride < 1:
            raise ConfigError(f"stride must be a positive integer, got {self.stride}")

    @property
    def bracket_kw(self) -> dict:
        return {"window": self.bracket_window, "points": self.bracket_points}


@lru_cache(maxsize=16)
def _nodes(window: float, points: int):
    y = np.linspace(-window, window, points + 1)
    w = np.full(y.shape, y[1] - y[0])
    w[0] = w[-1] = 0.5 * w[0]
    q2w = w / np.cosh(y) ** 2
    for arr in (y, q2w):
        arr.setflags(write=False)
    return y, q2w


def bracket_vee(potential: PotentialSpec, p: SolitonParams, window: float = 40.0,
                points: int = 2048) -> float:
    """``<V eta, eta> = int V eta^2 dx``."""
    y, q2w = _nodes(float(window), int(points))
    return float(p.c * np.dot(q2w, potential.eval(p.a + y / p.c)))


def bracket_vxe(potential: PotentialSpec, p: SolitonParams, window: float = 40.0,
                points: int = 2048) -> float:
    """``<V eta, (x - a) eta> = int V (x - a) eta^2 dx``."""
    y, q2w = _nodes(float(window), int(points))
    return float(np.dot(q2w * y, potential.eval(p.a + y / p.c)))


def _check_scale(c: float, config: EffectiveConfig, t=None):
    if not c > config.c_floor:
        raise ScaleCollapse(f"c = {c:.3e} fell below c_floor = {config.c_floor:g}"
                            + (f" at t = {t:.6g}" if t is not None else ""), t=t, c=c)


def rhs(config: EffectiveConfig, p: SolitonParams) -> tuple[float, float]:
    """Right-hand side ``(a', c')`` of the effective system."""
    _check_scale(p.c, config)
    eps = config.epsilon
    if eps == 0.0:
        return p.c**2, 0.0
    kw = config.bracket_kw
    return (p.c**2 + eps * bracket_vxe(config.potential, p, **kw) / p.c,
            eps * bracket_vee(config.potential, p, **kw))


def _rhs_vec(config, y, t):
    _check_scale(y[1], config, t)
    return np.array(rhs(config, SolitonParams(y[0], y[1])))


def integrate(config: EffectiveConfig, p0: SolitonParams, t0: float = 0.0) -> Trajectory:
    """Classical RK4 for ``(a, c)``; ``a`` is not reduced modulo any period.

    The step is ``sign(dt) * t_final / n_steps``. Samples are emitted at the
    start, every ``stride`` steps and at the end, with both brackets.
    """
    n_steps = int(math.ceil(config.t_final / abs(config.dt) - 1e-9))
    h = math.copysign(config.t_final / n_steps, config.dt) if n_steps else config.dt
    y = np.array([p0.a, p0.c], dtype=float)
    kw = config.bracket_kw
    pot = config.potential
    ts, a_s, c_s, vee, vxe = [], [], [], [], []

    def emit(t, y):
        p = SolitonParams(y[0], y[1])
        ts.append(t)
        a_s.append(y[0])
        c_s.append(y[1])
        vee.append(bracket_vee(pot, p, **kw))
        vxe.append(bracket_vxe(pot, p, **kw))

    emit(t0, y)
    for i in range(1, n_steps + 1):
        t = t0 + (i - 1) * h
        k1 = _rhs_vec(config, y, t)
        k2 = _rhs_vec(config, y + 0.5 * h * k1, t + 0.5 * h)
        k3 = _rhs_vec(config, y + 0.5 * h * k2, t + 0.5 * h)
        k4 = _rhs_vec(config, y + h * k3, t + h)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        _check_scale(y[1], config, t + h)
        if i % config.stride == 0 or i == n_steps:
            emit(t0 + i * h, y)
    return Trajectory(ts, a_s, c_s, {"bracket_vee": vee, "bracket_vxe": vxe},
                      meta={"epsilon": config.epsilon, "dt": h})


def scale_drift_bound(config: EffectiveConfig, traj: Trajectory) -> np.ndarray:
    """``K eps |t - t0|`` with ``K = 2 sup|V| sup c`` bounding ``|c(t) - c(t0)|``."""
    K = 2.0 * config.potential.sup_bound() * float(np.max(traj.c))
    return K * config.epsilon * np.abs(traj.t - traj.t[0])
