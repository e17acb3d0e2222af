"""External potentials ``V`` as finite sums of sinusoidal terms."""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConfigError

WAVEFORMS = ("sin", "cos", "cos2", "linear")
_ALIASES = {"cos^2": "cos2", "cos²": "cos2", "cossq": "cos2", "x": "linear"}


@dataclass(frozen=True)
class Term:
    """``amp * w(freq * x + phase)`` for a waveform ``w``.

    The ``linear`` waveform is ``amp * x``; it is unbounded and only
    accepted by the effective dynamics.
    """

    amp: float
    waveform: str
    freq: float = 0.0
    phase: float = 0.0

    def __post_init__(self):
        wf = _ALIASES.get(self.waveform, self.waveform)
        if wf not in WAVEFORMS:
            raise ConfigError(f"unknown waveform {self.waveform!r}; expected one of {WAVEFORMS}")
        object.__setattr__(self, "waveform", wf)
        for name in ("amp", "freq", "phase"):
            val = float(getattr(self, name))
            if not np.isfinite(val):
                raise ConfigError(f"term {name} must be finite, got {val}")
            object.__setattr__(self, name, val)
        if wf == "linear" and (self.freq or self.phase):
            raise ConfigError("linear terms take no freq or phase")

    def value(self, x):
        theta = self.freq * x + self.phase
        if self.waveform == "sin":
            return self.amp * np.sin(theta)
        if self.waveform == "cos":
            return self.amp * np.cos(theta)
        if self.waveform == "cos2":
            return self.amp * np.cos(theta) ** 2
        return self.amp * np.asarray(x, dtype=float)

    def derivative(self, x):
        theta = self.freq * x + self.phase
        if self.waveform == "sin":
            return self.amp * self.freq * np.cos(theta)
        if self.waveform == "cos":
            return -self.amp * self.freq * np.sin(theta)
        if self.waveform == "cos2":
            return -self.amp * self.freq * np.sin(2.0 * theta)
        return self.amp * np.ones_like(np.asarray(x, dtype=float))

    def is_periodic(self, length: float, tol: float = 1e-9) -> bool:
        if self.waveform == "linear":
            return self.amp == 0.0
        cycles = self.freq * length / (2.0 * np.pi)
        if self.waveform == "cos2":
            cycles *= 2.0
        return abs(cycles - round(cycles)) <= tol * max(1.0, abs(cycles))


@dataclass(frozen=True)
class PotentialSpec:
    """Symbolic potential ``V(x) = sum of terms``."""

    terms: tuple[Term, ...] = field(default_factory=tuple)
    name: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(
            t if isinstance(t, Term) else Term(**t) for t in self.terms))

    def __call__(self, x):
        return self.eval(x)

    def eval(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for t in self.terms:
            out = out + t.value(x)
        return out if out.ndim else float(out)

    def eval_derivative(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for t in self.terms:
            out = out + t.derivative(x)
        return out if out.ndim else float(out)

    def sample(self, grid) -> np.ndarray:
        return np.asarray(self.eval(grid.x), dtype=float)

    @property
    def bounded(self) -> bool:
        return all(t.waveform != "linear" or t.amp == 0.0 for t in self.terms)

    def sup_bound(self) -> float:
        """Upper bound on ``sup |V|``."""
        if not self.bounded:
            return np.inf
        return float(sum(abs(t.amp) for t in self.terms))

    def sup_derivative_bound(self) -> float:
        """Upper bound on ``sup |V'|``."""
        if not self.bounded:
            return np.inf
        return float(sum(abs(t.amp * t.freq) for t in self.terms))

    def c1_bound(self) -> float:
        """``sup|V| + sup|V'|`` bound."""
        return self.sup_bound() + self.sup_derivative_bound()

    def is_periodic(self, length: float) -> bool:
        return all(t.is_periodic(length) for t in self.terms)

    def validate_periodic(self, half_length: float) -> None:
        """Raise :class:`ConfigError` unless every term is ``2 l``-periodic."""
        bad = [t for t in self.terms if not t.is_periodic(2.0 * half_length)]
        if bad:
            raise ConfigError(
                f"potential terms {bad} are not periodic on [-{half_length}, {half_length})")

    def rescaled(self, scale: float) -> "PotentialSpec":
        """Potential ``x -> V(scale * x)``."""
        terms = []
        for t in self.terms:
            if t.waveform == "linear":
                terms.append(replace(t, amp=t.amp * scale))
            else:
                terms.append(replace(t, freq=t.freq * scale))
        return PotentialSpec(tuple(terms), name=self.name)

    def to_dict(self) -> dict:
        out = {"terms": [{"amp": t.amp, "waveform": t.waveform, "freq": t.freq,
                          "phase": t.phase} for t in self.terms]}
        if self.name:
            out["name"] = self.name
        return out

    @classmethod
    def from_dict(cls, data) -> "PotentialSpec":
        if isinstance(data, str):
            return preset(data)
        if "preset" in data:
            return preset(data["preset"])
        try:
            terms = tuple(Term(**t) for t in data.get("terms", ()))
        except TypeError as exc:
            raise ConfigError(f"bad potential term: {exc}") from None
        return cls(terms, name=data.get("name"))


def constant(kappa: float) -> PotentialSpec:
    return PotentialSpec((Term(kappa, "cos", 0.0, 0.0),), name=f"constant({kappa:g})")


def linear(slope: float = 1.0) -> PotentialSpec:
    return PotentialSpec((Term(slope, "linear"),), name=f"linear({slope:g})")


PRESETS = {
    "paper-v1": PotentialSpec((Term(-10.0, "cos2", 6.0), Term(6.0, "sin", 10.0)),
                              name="paper-v1"),
    "paper-v2": PotentialSpec((Term(8.0, "cos2", 4.0), Term(-4.0, "sin", 2.0)),
                              name="paper-v2"),
    "zero": PotentialSpec((), name="zero"),
}


def preset(name: str) -> PotentialSpec:
    try:
        return PRESETS[name]
    except KeyError:
        raise ConfigError(f"unknown potential preset {name!r}; known: {sorted(PRESETS)}") from None
