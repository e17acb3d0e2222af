"""Integrating-factor RK4 pseudospectral solver for the perturbed mKdV equation.

Evolves ``u_t = d_x(-u_xx - 2 u^3) + gamma V(x) u`` on a periodic grid.
In Fourier space the dispersion is ``i k^3 u_hat``; it is conjugated away
with ``exp(-i k^3 t)`` and classical RK4 is applied to the remainder
``N(u) = -2 d_x(u^3) + gamma V u``.
"""
from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .errors import ConfigError, NonFinite, StabilityWarning
from .potential import PotentialSpec
from .spectral import Grid
from .validation import check_field

logger = logging.getLogger(__name__)

Sink = Callable[[float, np.ndarray], None]


@dataclass(frozen=True)
class SolverConfig:
    """Run parameters for :func:`evolve`.

    ``dt`` may be negative to integrate backwards in time; ``t_final`` is the
    duration of the run. ``nonlinear=False`` drops the cubic term (a test hook).
    """

    grid: Grid
    potential: PotentialSpec = field(default_factory=PotentialSpec)
    coupling: float = 1.0
    dt: float = 1e-3
    t_final: float = 1.0
    snapshot_every: int = 1
    dealias: bool = True
    nonlinear: bool = True

    def __post_init__(self):
        if not (np.isfinite(self.dt) and self.dt != 0):
            raise ConfigError(f"dt must be finite and nonzero, got {self.dt}")
        if not (np.isfinite(self.t_final) and self.t_final >= 0):
            raise ConfigError(f"t_final must be >= 0, got {self.t_final}")
        if int(self.snapshot_every) != self.snapshot_every or self.snapshot_every < 1:
            raise ConfigError(f"snapshot_every must be a positive integer, got {self.snapshot_every}")
        if not self.potential.bounded:
            raise ConfigError("the PDE solver requires a bounded periodic potential")
        self.potential.validate_periodic(self.grid.half_length)

    @property
    def n_steps(self) -> int:
        return int(math.ceil(self.t_final / abs(self.dt) - 1e-9))

    def dt_suggest(self, u0) -> float:
        """Advisory step bound ``1 / (k_max (6 max|u0|^2 + |gamma| sup|V|) + 1)``."""
        umax = float(np.max(np.abs(u0)))
        vb = abs(self.coupling) * self.potential.sup_bound()
        return 1.0 / (self.grid.k_max * (6.0 * umax**2 + vb) + 1.0)


@dataclass
class EvolutionState:
    """Solution at time ``t``; ``u_hat`` holds ``np.fft.rfft`` coefficients."""

    t: float
    u_hat: np.ndarray
    step_count: int = 0

    def values(self, grid: Grid) -> np.ndarray:
        return np.fft.irfft(self.u_hat, n=grid.n)


class _Stepper:
    """Precomputed operators for one (config, time step) pair."""

    def __init__(self, config: SolverConfig, h: float):
        grid = config.grid
        self.n = grid.n
        self.h = h
        kr = grid.kr.copy()
        kr[-1] = 0.0
        self.ik = 1j * kr
        self.half = np.exp(1j * kr**3 * (h / 2.0))
        self.full = self.half**2
        self.gv = config.coupling * config.potential.sample(grid)
        self.use_v = bool(np.any(self.gv))
        self.dealias = config.dealias
        self.nonlinear = config.nonlinear

    def cube_hat(self, u_hat, u):
        if not self.dealias:
            return np.fft.rfft(u**3)
        n = self.n
        pad = np.zeros(n + 1, dtype=complex)
        pad[: n // 2] = u_hat[: n // 2]
        fine = 2.0 * np.fft.irfft(pad, n=2 * n)
        return 0.5 * np.fft.rfft(fine**3)[: n // 2 + 1]

    def rhs(self, u_hat):
        u = np.fft.irfft(u_hat, n=self.n)
        out = np.zeros_like(u_hat)
        if self.nonlinear:
            out += -2.0 * self.ik * self.cube_hat(u_hat, u)
        if self.use_v:
            out += np.fft.rfft(self.gv * u)
        out[-1] = 0.0
        return out

    def step(self, u_hat):
        h, E, E2 = self.h, self.half, self.full
        k1 = self.rhs(u_hat)
        k2 = self.rhs(E * (u_hat + 0.5 * h * k1))
        k3 = self.rhs(E * u_hat + 0.5 * h * k2)
        k4 = self.rhs(E2 * u_hat + h * E * k3)
        new = E2 * u_hat + (h / 6.0) * (E2 * k1 + 2.0 * E * (k2 + k3) + k4)
        new[0] = new[0].real
        if not np.all(np.isfinite(new)):
            raise NonFinite("non-finite Fourier coefficients")
        return new


def initial_state(grid: Grid, u0, t0: float = 0.0) -> EvolutionState:
    u0 = check_field(grid, u0, "u0")
    u_hat = np.fft.rfft(u0)
    u_hat[-1] = 0.0
    return EvolutionState(float(t0), u_hat, 0)


def nonlinear_rhs(grid: Grid, u, potential: PotentialSpec, coupling: float,
                  dealias: bool = True) -> np.ndarray:
    """Physical-space ``-2 d_x(u^3) + gamma V u`` (Nyquist mode removed)."""
    cfg = SolverConfig(grid, potential, coupling, dt=1.0, t_final=0.0, dealias=dealias)
    st = _Stepper(cfg, 1.0)
    u_hat = np.fft.rfft(check_field(grid, u))
    u_hat[-1] = 0.0
    out = st.rhs(u_hat)
    if not np.all(np.isfinite(out)):
        raise NonFinite("non-finite right-hand side")
    return np.fft.irfft(out, n=grid.n)


def step(state: EvolutionState, config: SolverConfig) -> EvolutionState:
    """Advance ``state`` by one step of size ``config.dt``."""
    st = _Stepper(config, config.dt)
    return EvolutionState(state.t + config.dt, st.step(state.u_hat), state.step_count + 1)


def evolve(u0, config: SolverConfig, sink: Sink | None = None,
           t0: float = 0.0) -> EvolutionState:
    """Integrate from ``u0`` for ``config.t_final`` time units.

    The step is ``sign(dt) * t_final / n_steps`` so the run ends exactly at
    ``t0 +- t_final``. ``sink(t, u)`` receives the initial field, every
    ``snapshot_every``-th step and the final field.
    """
    grid = config.grid
    state = initial_state(grid, u0, t0)
    u_init = state.values(grid)
    n_steps = config.n_steps
    h = math.copysign(config.t_final / n_steps, config.dt) if n_steps else config.dt
    if abs(h) > config.dt_suggest(u_init):
        warnings.warn(f"|dt| = {abs(h):.3g} exceeds suggested {config.dt_suggest(u_init):.3g}",
                      StabilityWarning, stacklevel=2)
    stepper = _Stepper(config, h)
    history = [(state.t, float(np.max(np.abs(u_init))))]
    if sink is not None:
        sink(state.t, u_init)
    u_hat = state.u_hat
    for i in range(1, n_steps + 1):
        t = t0 + i * h
        try:
            u_hat = stepper.step(u_hat)
        except NonFinite:
            logger.error("blow-up at t=%.6g", t)
            raise NonFinite(f"solution blew up at t={t:.6g}", t=t, history=history) from None
        if i % config.snapshot_every == 0 or i == n_steps:
            u = np.fft.irfft(u_hat, n=grid.n)
            history.append((t, float(np.max(np.abs(u)))))
            if sink is not None:
                sink(t, u)
    return EvolutionState(t0 + n_steps * h, u_hat, n_steps)


class SnapshotRecorder:
    """Sink that keeps every snapshot in memory."""

    def __init__(self):
        self.times: list[float] = []
        self.fields: list[np.ndarray] = []

    def __call__(self, t, u):
        self.times.append(float(t))
        self.fields.append(np.array(u, dtype=float))

    def __len__(self):
        return len(self.times)

    def __iter__(self):
        return iter(zip(self.times, self.fields))

    @property
    def t(self) -> np.ndarray:
        return np.asarray(self.times)

    @property
    def U(self) -> np.ndarray:
        return np.asarray(self.fields)


def with_dt(config: SolverConfig, dt: float) -> SolverConfig:
    return replace(config, dt=dt)
