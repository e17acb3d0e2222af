"""The soliton family ``eta(x, a, c) = c sech(c (x - a))`` and its tangent vectors."""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import TailTruncationWarning
from .spectral import Grid, periodic_distance

TAIL_THRESHOLD = 20.0


@dataclass(frozen=True)
class SolitonParams:
    """Position ``a`` and scale ``c > 0`` on the soliton manifold."""

    a: float
    c: float

    def __post_init__(self):
        a, c = float(self.a), float(self.c)
        if not np.isfinite(a):
            raise ValueError(f"a must be finite, got {self.a}")
        if not (np.isfinite(c) and c > 0):
            raise ValueError(f"c must be positive, got {self.c}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "c", c)

    def as_array(self) -> np.ndarray:
        return np.array([self.a, self.c])


class Pairings(NamedTuple):
    """Closed-form ``J^{-1} d_a eta`` and ``J^{-1} d_c eta`` sampled on a grid."""

    j_inv_da: np.ndarray
    j_inv_dc: np.ndarray


_warned_grids: set = set()


def _scaled_offset(grid: Grid, p: SolitonParams) -> np.ndarray:
    # one warning per grid; soliton samplers are called on every step of a fit
    if p.c * grid.half_length < TAIL_THRESHOLD and grid not in _warned_grids:
        _warned_grids.add(grid)
        warnings.warn(
            f"c*l = {p.c * grid.half_length:.3g} < {TAIL_THRESHOLD}: soliton tails "
            "are truncated at the domain seam", TailTruncationWarning, stacklevel=3)
    return periodic_distance(grid, grid.x, p.a)


def sech(z):
    # overflow-free form of 1 / cosh(z)
    e = np.exp(-np.abs(z))
    return 2.0 * e / (1.0 + e * e)


def eta(grid: Grid, p: SolitonParams) -> np.ndarray:
    d = _scaled_offset(grid, p)
    return p.c * sech(p.c * d)


def d_a_eta(grid: Grid, p: SolitonParams) -> np.ndarray:
    """``d eta / d a = -d eta / dx``."""
    z = p.c * _scaled_offset(grid, p)
    return p.c**2 * sech(z) * np.tanh(z)


def d_c_eta(grid: Grid, p: SolitonParams) -> np.ndarray:
    """``d eta / d c = Q(z) + z Q'(z)`` with ``z = c (x - a)``."""
    z = p.c * _scaled_offset(grid, p)
    return sech(z) * (1.0 - z * np.tanh(z))


def invariants_on_soliton(p: SolitonParams) -> tuple[float, float, float]:
    """Closed-form mass, momentum and Hamiltonian of ``eta(., a, c)`` on the line."""
    return np.pi, p.c, -(p.c**3) / 3.0


def symplectic_pairings(grid: Grid, p: SolitonParams) -> Pairings:
    """Return ``J^{-1} d_a eta = -eta`` and ``J^{-1} d_c eta = (x - a) eta / c``.

    These are the exact formulas on the real line, not grid antiderivatives;
    ``eta`` has nonzero mean so the periodic antiderivative does not apply.
    """
    d = _scaled_offset(grid, p)
    e = p.c * sech(p.c * d)
    return Pairings(-e, d * e / p.c)
