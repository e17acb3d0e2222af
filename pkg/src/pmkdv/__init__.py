"""Pseudospectral lab for solitons of the perturbed modified KdV equation

    u_t = (-u_xx - 2 u^3)_x + eps V u

on a periodic interval, with the effective (a, c) dynamics, a symplectic
soliton tracker and the diagnostics used to compare the two.
"""
from .effective import EffectiveConfig, integrate
from .errors import (ConfigError, InsufficientPoints, MeanNotZero, NoConvergence, NonFinite,
                     PmkdvError, ScaleCollapse, StabilityWarning, TailTruncationWarning,
                     ZeroField)
from .experiments import RunConfig, run_compare, run_scaling
from .potential import PotentialSpec, Term
from .soliton import SolitonParams, eta
from .solver import SnapshotRecorder, SolverConfig, evolve
from .spectral import Grid
from .tracker import SolitonFitter, symplectic_fit, track
from .trajectory import Trajectory

__version__ = "0.1.0"

__all__ = [
    "ConfigError", "EffectiveConfig", "Grid", "InsufficientPoints", "MeanNotZero",
    "NoConvergence", "NonFinite", "PmkdvError", "PotentialSpec", "RunConfig", "ScaleCollapse",
    "SnapshotRecorder", "SolitonFitter", "SolitonParams", "SolverConfig", "StabilityWarning",
    "TailTruncationWarning", "Term", "Trajectory", "ZeroField", "eta", "evolve", "integrate",
    "run_compare", "run_scaling", "symplectic_fit", "track",
]
