"""Run configuration, benchmark presets and the PDE-vs-ODE comparison pipeline."""
from __future__ import annotations

import json
import logging
import math
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np
import tomli
import tomli_w

from . import diagnostics as dg
from .effective import EffectiveConfig, integrate
from .errors import ConfigError, InsufficientPoints, NoConvergence
from .io import BinarySnapshotWriter, CSVSnapshotWriter, write_rows
from .potential import PotentialSpec, preset as potential_preset
from .soliton import SolitonParams, eta
from .solver import SolverConfig, evolve, initial_state
from .spectral import Grid, h1_norm, weighted_h1_norm
from .tracker import TRACK_COLUMNS, symplectic_fit
from .trajectory import Trajectory

logger = logging.getLogger(__name__)

FRAMES = ("rescaled", "physical")
COMPARE_COLUMNS = ("t", "a_pde", "c_pde", "a_ode", "c_ode", "delta_a", "delta_c")
DIAGNOSTIC_COLUMNS = ("t", "mass", "momentum", "hamiltonian", "w_h1", "w_weighted_h1",
                      "virial", "energy_E", "envelope_margin")


@dataclass(frozen=True)
class Perturbation:
    """Initial perturbation scaled to ``||p||_{H1} = omega0``.

    ``kind`` is ``cos``/``sin`` (single periodic mode ``mode``) or
    ``random`` (band-limited to modes ``<= mode`` with a seeded generator).
    """

    kind: str = "cos"
    mode: int = 3
    omega0: float = 0.0

    def __post_init__(self):
        if self.kind not in ("cos", "sin", "random"):
            raise ConfigError(f"unknown perturbation kind {self.kind!r}")
        if self.mode < 1:
            raise ConfigError("perturbation mode must be >= 1")
        if not self.omega0 >= 0:
            raise ConfigError("omega0 must be >= 0")

    def field(self, grid: Grid, seed: int = 0) -> np.ndarray:
        if self.omega0 == 0:
            return np.zeros(grid.n)
        kx = np.pi / grid.half_length * grid.x
        if self.kind == "cos":
            f = np.cos(self.mode * kx)
        elif self.kind == "sin":
            f = np.sin(self.mode * kx)
        else:
            rng = np.random.default_rng(seed)
            m = np.arange(1, self.mode + 1)
            amp = rng.standard_normal((2, m.size))
            f = amp[0] @ np.cos(np.outer(m, kx)) + amp[1] @ np.sin(np.outer(m, kx))
        return self.omega0 * f / h1_norm(grid, f)


@dataclass(frozen=True)
class RunConfig:
    """A complete, file-serialisable run description.

    ``potential`` is given in the rescaled variable ``X``; the physical frame
    evolves ``u_t = ... + eps V(eps^{1/3} x) u`` on ``l = pi eps^{-1/3}``.
    ``a0, c0, dt, t_final`` are in the coordinates of ``frame``.
    """

    frame: str = "rescaled"
    epsilon: float = 0.01
    n: int = 1024
    potential: PotentialSpec = field(default_factory=lambda: potential_preset("paper-v1"))
    a0: float = 0.0
    c0: float = 1.0
    dt: float = 5e-5
    t_final: float = 0.1
    snapshot_every: int = 20
    perturbation: Perturbation | None = None
    output_dir: str | None = None
    seed: int = 0
    snapshot_format: str = "none"
    name: str | None = None

    def __post_init__(self):
        if self.frame not in FRAMES:
            raise ConfigError(f"frame must be one of {FRAMES}, got {self.frame!r}")
        if not (np.isfinite(self.epsilon) and self.epsilon >= 0):
            raise ConfigError("epsilon must be >= 0")
        if self.frame == "physical" and self.epsilon == 0:
            raise ConfigError("the physical frame needs epsilon > 0 (domain l = pi eps^{-1/3})")
        if not self.c0 > 0:
            raise ConfigError("c0 must be positive")
        if not self.dt > 0:
            raise ConfigError("dt must be positive")
        if not self.t_final >= 0:
            raise ConfigError("t_final must be >= 0")
        if self.snapshot_format not in ("none", "csv", "bin"):
            raise ConfigError("snapshot_format must be none, csv or bin")
        if isinstance(self.potential, (str, dict)):
            object.__setattr__(self, "potential", PotentialSpec.from_dict(self.potential))
        if isinstance(self.perturbation, dict):
            object.__setattr__(self, "perturbation", Perturbation(**self.perturbation))
        try:
            Grid(self.n, self.half_length)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        self.frame_potential.validate_periodic(self.half_length)

    # frame-dependent quantities

    @property
    def half_length(self) -> float:
        if self.frame == "rescaled":
            return math.pi
        return math.pi * self.epsilon ** (-1.0 / 3.0)

    @property
    def coupling(self) -> float:
        return 1.0 if self.frame == "rescaled" else self.epsilon

    @property
    def frame_potential(self) -> PotentialSpec:
        if self.frame == "rescaled":
            return self.potential
        return self.potential.rescaled(self.epsilon ** (1.0 / 3.0))

    @property
    def grid(self) -> Grid:
        return Grid(self.n, self.half_length)

    def solver_config(self) -> SolverConfig:
        return SolverConfig(self.grid, self.frame_potential, self.coupling, self.dt,
                            self.t_final, self.snapshot_every)

    def initial_field(self) -> np.ndarray:
        grid = self.grid
        u0 = eta(grid, SolitonParams(self.a0, self.c0))
        if self.perturbation is not None:
            u0 = u0 + self.perturbation.field(grid, self.seed)
        return u0

    def twin(self) -> "RunConfig":
        """The same run expressed in the other frame.

        Uses ``X = eps^{1/3} x``, ``T = eps t``, ``U = eps^{-1/3} u``.
        """
        e3 = self.epsilon ** (1.0 / 3.0)
        if self.frame == "physical":
            return replace(self, frame="rescaled", a0=self.a0 * e3, c0=self.c0 / e3,
                           dt=self.dt * self.epsilon, t_final=self.t_final * self.epsilon,
                           perturbation=self._scaled_perturbation(1.0 / e3))
        return replace(self, frame="physical", a0=self.a0 / e3, c0=self.c0 * e3,
                       dt=self.dt / self.epsilon, t_final=self.t_final / self.epsilon,
                       perturbation=self._scaled_perturbation(e3))

    def _scaled_perturbation(self, amp_scale):
        if self.perturbation is None:
            return None
        # H1 norms do not map by a single factor; keep the mode, rescale the amplitude
        return replace(self.perturbation, omega0=self.perturbation.omega0 * amp_scale)

    # serialisation

    def to_dict(self) -> dict:
        d = asdict(self)
        d["potential"] = self.potential.to_dict()
        d["grid"] = {"n": d.pop("n")}
        if self.perturbation is None:
            d.pop("perturbation")
        for k in ("output_dir", "name"):
            if d[k] is None:
                d.pop(k)
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        data = dict(data)
        if "preset" in data:
            base = preset(data.pop("preset")).to_dict()
            base.update(data)
            data = base
        grid = data.pop("grid", {})
        if "n" in grid:
            data["n"] = grid["n"]
        for k in ("x_half_length", "half_length"):
            if k in grid:
                raise ConfigError("the domain half-length is fixed by the frame")
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if "potential" in data:
            data["potential"] = PotentialSpec.from_dict(data["potential"])
        if "perturbation" in data and not isinstance(data["perturbation"], Perturbation):
            try:
                data["perturbation"] = Perturbation(**data["perturbation"])
            except TypeError as exc:
                raise ConfigError(f"bad perturbation: {exc}") from None
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None

    def to_toml(self) -> str:
        return tomli_w.dumps(self.to_dict())

    @classmethod
    def from_toml(cls, text: str) -> "RunConfig":
        try:
            return cls.from_dict(tomli.loads(text))
        except tomli.TOMLDecodeError as exc:
            raise ConfigError(f"invalid TOML: {exc}") from None

    @classmethod
    def load(cls, path) -> "RunConfig":
        return cls.from_toml(Path(path).read_text())


def _benchmark_preset(pot: str, name: str) -> RunConfig:
    eps = 0.01
    return RunConfig(frame="rescaled", epsilon=eps, n=1024, potential=potential_preset(pot),
                     a0=0.0, c0=1.0, dt=5e-5, t_final=math.sqrt(eps), snapshot_every=20,
                     name=name)


PRESETS = {
    "fig1": lambda: _benchmark_preset("paper-v1", "fig1"),
    "fig2": lambda: _benchmark_preset("paper-v2", "fig2"),
}


def preset(name: str) -> RunConfig:
    try:
        return PRESETS[name]()
    except KeyError:
        raise ConfigError(f"unknown run preset {name!r}; known: {sorted(PRESETS)}") from None


# pipelines ----------------------------------------------------------------

@dataclass
class ComparisonReport:
    config: RunConfig
    pde: Trajectory
    ode: Trajectory
    diagnostics: dict
    max_delta_a: float
    max_delta_c: float
    envelope_orbital: float
    envelope_predictive: float
    omega: float
    balance: tuple
    failure: float | None = None

    @property
    def max_rel_delta_c(self) -> float:
        return self.max_delta_c / self.config.c0

    def summary(self) -> dict:
        return {
            "name": self.config.name,
            "frame": self.config.frame,
            "epsilon": self.config.epsilon,
            "t_final": self.config.t_final,
            "horizon_eps_sqrt": self.horizon_scaled,
            "samples": len(self.pde),
            "max_delta_a": self.max_delta_a,
            "max_delta_c": self.max_delta_c,
            "max_rel_delta_c": self.max_rel_delta_c,
            "envelope_C_orbital": self.envelope_orbital,
            "envelope_C_predictive": self.envelope_predictive,
            "omega": self.omega,
            "mass_balance_residual": self.balance[0],
            "momentum_balance_residual": self.balance[1],
            "failure": self.failure,
        }

    @property
    def horizon_scaled(self) -> float:
        """Horizon measured in units of ``eps^{-1/2}`` physical time."""
        cfg = self.config
        t_phys = cfg.t_final if cfg.frame == "physical" else cfg.t_final / max(cfg.epsilon, 1e-300)
        return t_phys * math.sqrt(cfg.epsilon)


class _CompareSink:
    """Streaming tracker plus per-snapshot diagnostics."""

    def __init__(self, cfg: RunConfig, ode: Trajectory, weight: dg.VirialWeight):
        self.cfg = cfg
        self.grid = cfg.grid
        self.ode = ode
        self.weight = weight
        self.alpha = weight.alpha
        self.v = cfg.frame_potential.sample(self.grid)
        self.prev = None
        self.a_ref = None
        self.failure = None
        self.rows = {k: [] for k in TRACK_COLUMNS}
        self.diag = {k: [] for k in DIAGNOSTIC_COLUMNS if k != "envelope_margin"}
        self.w_ode = {"h1": [], "weighted": []}
        self.balance = {"t": [], "M": [], "P": [], "fm": [], "fp": []}
        self.i = 0

    def __call__(self, t, u):
        if self.failure is not None:
            return
        grid = self.grid
        start = self.prev or SolitonParams(self.cfg.a0, self.cfg.c0)
        try:
            fit = symplectic_fit(grid, u, start)
        except NoConvergence as exc:
            logger.warning("fit failed at t=%.6g: %s", t, exc)
            self.failure = float(t)
            return
        p = fit.params
        a = p.a if self.a_ref is None else self.a_ref + float(
            np.mod(p.a - self.a_ref + grid.half_length, grid.length) - grid.half_length)
        self.a_ref = a
        self.prev = p
        for k, v in zip(TRACK_COLUMNS, (t, a, p.c, *fit.residuals, fit.deviation_h1, fit.iterations)):
            self.rows[k].append(v)
        w = u - eta(grid, p)
        triple = dg.conserved(grid, u)
        self.diag["t"].append(float(t))
        self.diag["mass"].append(triple.mass)
        self.diag["momentum"].append(triple.momentum)
        self.diag["hamiltonian"].append(triple.hamiltonian)
        self.diag["w_h1"].append(fit.deviation_h1)
        self.diag["w_weighted_h1"].append(weighted_h1_norm(grid, w, p.a, self.alpha))
        self.diag["virial"].append(dg.virial_functional(grid, w, p, self.weight))
        self.diag["energy_E"].append(dg.energy_functional(grid, w, p))
        if self.i < len(self.ode):
            q = SolitonParams(self.ode.a[self.i], self.ode.c[self.i])
            wq = u - eta(grid, q)
            self.w_ode["h1"].append(h1_norm(grid, wq))
            self.w_ode["weighted"].append(weighted_h1_norm(grid, wq, q.a, self.alpha))
        self.balance["t"].append(float(t))
        self.balance["M"].append(triple.mass)
        self.balance["P"].append(triple.momentum)
        self.balance["fm"].append(self.cfg.coupling * float(grid.dx * np.dot(self.v, u)))
        self.balance["fp"].append(self.cfg.coupling * float(grid.dx * np.dot(self.v, u * u)))
        self.i += 1

    def trajectory(self) -> Trajectory:
        r = self.rows
        return Trajectory(r["t"], r["a_unwrapped"], r["c"],
                          {k: r[k] for k in TRACK_COLUMNS[3:]}, failure=self.failure)


def _balance(b):
    from scipy.integrate import simpson
    t = np.asarray(b["t"])
    if t.size < 3:
        return (float("nan"), float("nan"))
    rm = abs(b["M"][-1] - b["M"][0] - simpson(b["fm"], x=t))
    rp = abs(b["P"][-1] - b["P"][0] - simpson(b["fp"], x=t))
    return (rm / max(abs(b["M"][0]), 1e-300), rp / max(b["P"][0], 1e-300))


def effective_config(cfg: RunConfig) -> EffectiveConfig:
    """ODE settings whose samples coincide with the PDE snapshots."""
    sc = cfg.solver_config()
    n_steps = sc.n_steps
    h = cfg.t_final / n_steps if n_steps else cfg.dt
    if n_steps and n_steps % cfg.snapshot_every == 0:
        return EffectiveConfig(cfg.coupling, cfg.frame_potential, h * cfg.snapshot_every,
                               cfg.t_final)
    return EffectiveConfig(cfg.coupling, cfg.frame_potential, h, cfg.t_final,
                           stride=cfg.snapshot_every)


def run_effective(cfg: RunConfig, p0: SolitonParams | None = None) -> Trajectory:
    return integrate(effective_config(cfg), p0 or SolitonParams(cfg.a0, cfg.c0))


def _prepare_dir(cfg: RunConfig):
    if cfg.output_dir is None:
        return None
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.toml").write_text(cfg.to_toml())
    return out


def _snapshot_writer(cfg: RunConfig, out):
    if out is None or cfg.snapshot_format == "none":
        return None
    if cfg.snapshot_format == "csv":
        return CSVSnapshotWriter(out / "snapshots.csv", cfg.grid)
    return BinarySnapshotWriter(out / "snapshots.bin", cfg.grid, cfg.dt)


def run_simulate(cfg: RunConfig, sink=None):
    """Evolve the PDE only, writing snapshots if an output directory is set."""
    out = _prepare_dir(cfg)
    writer = _snapshot_writer(cfg, out)
    sinks = [s for s in (writer, sink) if s is not None]
    def fan(t, u):
        for s in sinks:
            s(t, u)
    try:
        return evolve(cfg.initial_field(), cfg.solver_config(), fan)
    finally:
        if writer is not None:
            writer.close()


def run_compare(cfg: RunConfig, weight: dg.VirialWeight | None = None) -> ComparisonReport:
    """Evolve the PDE, track it, integrate the effective ODEs on the same times."""
    weight = weight or dg.VirialWeight()
    out = _prepare_dir(cfg)
    grid = cfg.grid
    u0 = cfg.initial_field()
    nominal = SolitonParams(cfg.a0, cfg.c0)
    # the solver drops the Nyquist mode; decompose the field it actually evolves
    u0 = initial_state(grid, u0).values(grid)
    fit0 = symplectic_fit(grid, u0, nominal)
    # the fitted split at t=0 differs from the nominal one by the seam taper,
    # so omega bounds both deviations
    omega = max(h1_norm(grid, u0 - eta(grid, nominal)), fit0.deviation_h1)
    perturbed = cfg.perturbation is not None and cfg.perturbation.omega0 > 0
    p0 = fit0.params if perturbed else nominal
    ode = run_effective(cfg, p0)
    sink = _CompareSink(cfg, ode, weight)
    writer = _snapshot_writer(cfg, out)
    def fan(t, u):
        sink(t, u)
        if writer is not None:
            writer(t, u)
    try:
        evolve(u0, cfg.solver_config(), fan)
    finally:
        if writer is not None:
            writer.close()
        _write_partial(out, sink, ode)
    pde = sink.trajectory()
    m = min(len(pde), len(ode))
    da = np.abs(pde.a[:m] - ode.a[:m])
    dc = np.abs(pde.c[:m] - ode.c[:m])
    diag = {k: np.asarray(v) for k, v in sink.diag.items()}
    if m >= 2:
        orb = dg.stability_envelopes(diag["t"], diag["w_h1"], diag["w_weighted_h1"],
                                   cfg.coupling, omega, "orbital")
        k = min(m, len(sink.w_ode["h1"]))
        pred = dg.stability_envelopes(diag["t"][:k], sink.w_ode["h1"][:k],
                                    sink.w_ode["weighted"][:k], cfg.coupling, omega,
                                    "predictive")
        diag["envelope_margin"] = orb.margin
        c_orb, c_pred = orb.C, pred.C
    else:
        diag["envelope_margin"] = np.zeros(len(diag["t"]))
        c_orb = c_pred = float("nan")
    report = ComparisonReport(cfg, pde, ode, diag, float(da.max(initial=0.0)),
                              float(dc.max(initial=0.0)), c_orb, c_pred, omega,
                              _balance(sink.balance), pde.failure)
    if out is not None:
        _write_report(out, report)
    if pde.failure is not None:
        raise NoConvergence(f"tracking failed at t={pde.failure}", t=pde.failure, partial=report)
    return report


def _write_partial(out, sink, ode):
    if out is None:
        return
    sink.trajectory().to_csv(out / "track.csv", names=TRACK_COLUMNS)
    ode.to_csv(out / "effective.csv")


def _write_report(out: Path, report: ComparisonReport):
    m = min(len(report.pde), len(report.ode))
    p, o = report.pde, report.ode
    rows = zip(p.t[:m], p.a[:m], p.c[:m], o.a[:m], o.c[:m], p.a[:m] - o.a[:m], p.c[:m] - o.c[:m])
    write_rows(out / "compare.csv", COMPARE_COLUMNS, rows)
    d = report.diagnostics
    write_rows(out / "diagnostics.csv", DIAGNOSTIC_COLUMNS, zip(*(d[k] for k in DIAGNOSTIC_COLUMNS)))
    (out / "report.json").write_text(json.dumps(report.summary(), indent=2, sort_keys=True) + "\n")


@dataclass
class ScalingReport:
    epsilons: np.ndarray
    max_delta_a: np.ndarray
    max_delta_c: np.ndarray
    exponent_a: float
    exponent_c: float
    reports: list

    def summary(self) -> dict:
        return {"epsilons": self.epsilons.tolist(), "max_delta_a": self.max_delta_a.tolist(),
                "max_delta_c": self.max_delta_c.tolist(), "exponent_a": self.exponent_a,
                "exponent_c": self.exponent_c}


def power_law_exponent(x, y) -> float:
    """Least-squares slope of ``log y`` against ``log x``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 2:
        raise InsufficientPoints("need at least two points for a power-law fit")
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


def scaled_config(base: RunConfig, epsilon: float) -> RunConfig:
    """``base`` at a new ``epsilon`` with the horizon ``t_final`` kept at the same
    multiple of ``eps^{1/2}`` (rescaled frame) or ``eps^{-1/2}`` (physical frame)."""
    r = math.sqrt(epsilon / base.epsilon)
    t_final = base.t_final * r if base.frame == "rescaled" else base.t_final / r
    out_dir = None
    if base.output_dir is not None:
        out_dir = str(Path(base.output_dir) / f"eps_{epsilon:.6g}")
    return replace(base, epsilon=epsilon, t_final=t_final, output_dir=out_dir)


def run_scaling(base: RunConfig, epsilons) -> ScalingReport:
    """Compare PDE and ODE tracks over matched horizons for each ``epsilon``."""
    eps = np.asarray(list(epsilons), dtype=float)
    if eps.size < 2:
        raise InsufficientPoints("scaling study needs at least two epsilon values")
    if np.any(np.diff(eps) >= 0) or np.any(eps <= 0):
        raise ConfigError("epsilons must be positive and strictly decreasing")
    reports = [run_compare(scaled_config(base, e)) for e in eps]
    da = np.array([r.max_delta_a for r in reports])
    dc = np.array([r.max_rel_delta_c for r in reports])
    rep = ScalingReport(eps, da, dc, power_law_exponent(eps, da), power_law_exponent(eps, dc),
                        reports)
    if base.output_dir is not None:
        out = Path(base.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "scaling.json").write_text(json.dumps(rep.summary(), indent=2, sort_keys=True) + "\n")
    return rep
