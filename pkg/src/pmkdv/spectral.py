"""Periodic grid and Fourier spectral calculus.

Fields are plain 1-D float arrays sampled at ``grid.x``; spectral
coefficients are complex arrays in numpy FFT order, normalised so that
``f(x) = sum_k F_k exp(i k x)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import MeanNotZero
from .validation import check_field

__all__ = [
    "Grid",
    "forward",
    "inverse",
    "spectral_derivative",
    "antiderivative",
    "dealiased_cube",
    "quadrature",
    "inner",
    "symplectic_form",
    "l2_norm",
    "h1_norm",
    "weighted_h1_norm",
    "periodic_distance",
]


@dataclass(frozen=True)
class Grid:
    """Uniform periodic mesh on ``[-half_length, half_length)``."""

    n: int
    half_length: float

    def __post_init__(self):
        n = int(self.n)
        if n < 16 or n & (n - 1):
            raise ValueError(f"n must be a power of two >= 16, got {self.n}")
        if not (np.isfinite(self.half_length) and self.half_length > 0):
            raise ValueError(f"half_length must be positive, got {self.half_length}")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "half_length", float(self.half_length))

    @property
    def length(self) -> float:
        return 2.0 * self.half_length

    @property
    def dx(self) -> float:
        return self.length / self.n

    @cached_property
    def x(self) -> np.ndarray:
        x = -self.half_length + self.dx * np.arange(self.n)
        x.setflags(write=False)
        return x

    @cached_property
    def k(self) -> np.ndarray:
        """Wavenumbers ``(pi/l) * j`` in FFT order (Nyquist at index n/2, negative)."""
        k = (np.pi / self.half_length) * np.fft.fftfreq(self.n, d=1.0 / self.n)
        k.setflags(write=False)
        return k

    @cached_property
    def kr(self) -> np.ndarray:
        """Nonnegative wavenumbers matching ``np.fft.rfft`` output."""
        kr = (np.pi / self.half_length) * np.arange(self.n // 2 + 1)
        kr.setflags(write=False)
        return kr

    @property
    def k_max(self) -> float:
        return np.pi * self.n / self.length

    @cached_property
    def _phase(self) -> np.ndarray:
        # shifts FFT coefficients from the x_0 = 0 convention to x_0 = -l
        return np.exp(1j * self.k * self.half_length)


def forward(grid: Grid, f) -> np.ndarray:
    """Fourier coefficients of ``f`` (length ``n``, FFT order)."""
    f = check_field(grid, f)
    return np.fft.fft(f) / grid.n * grid._phase


def inverse(grid: Grid, F) -> np.ndarray:
    """Real field with Fourier coefficients ``F``; imaginary round-off is dropped."""
    F = np.asarray(F, dtype=complex)
    if F.shape != (grid.n,):
        raise ValueError(f"expected {grid.n} coefficients, got shape {F.shape}")
    return np.fft.ifft(F / grid._phase * grid.n).real


def _odd_multiplier(grid: Grid, order: int) -> np.ndarray:
    mult = (1j * grid.kr) ** order
    if order % 2:
        mult[-1] = 0.0
    return mult


def spectral_derivative(grid: Grid, f, order: int = 1) -> np.ndarray:
    """``order``-th derivative (1, 2 or 3). Odd orders zero the Nyquist mode."""
    if order not in (1, 2, 3):
        raise ValueError(f"order must be 1, 2 or 3, got {order}")
    f = check_field(grid, f)
    return np.fft.irfft(np.fft.rfft(f) * _odd_multiplier(grid, order), n=grid.n)


def antiderivative(grid: Grid, f, tol_mean: float | None = None) -> np.ndarray:
    """Mean-zero periodic antiderivative (Fourier division by ``ik``).

    Raises :class:`MeanNotZero` unless ``|mean(f)| < tol_mean``; the default
    tolerance is ``1e-10 * max|f|``.
    """
    f = check_field(grid, f)
    mean = f.mean()
    scale = np.max(np.abs(f), initial=0.0)
    if tol_mean is None:
        tol_mean = 1e-10 * scale
    if abs(mean) > tol_mean:
        raise MeanNotZero(f"mean {mean:.3e} exceeds tolerance {tol_mean:.3e}")
    F = np.fft.rfft(f)
    kr = grid.kr
    out = np.zeros_like(F)
    out[1:-1] = F[1:-1] / (1j * kr[1:-1])
    return np.fft.irfft(out, n=grid.n)


def dealiased_cube(grid: Grid, f) -> np.ndarray:
    """Projection of ``f**3`` onto the band ``|k| < n/2`` via 2x zero padding.

    The input Nyquist coefficient is treated as a cosine mode (split evenly
    between +n/2 and -n/2); the output Nyquist coefficient is zero.
    """
    f = check_field(grid, f)
    n = grid.n
    F = np.fft.rfft(f)
    pad = np.zeros(n + 1, dtype=complex)
    pad[: n // 2] = F[: n // 2]
    pad[n // 2] = 0.5 * F[n // 2].real
    fine = 2.0 * np.fft.irfft(pad, n=2 * n)
    G = 0.5 * np.fft.rfft(fine**3)[: n // 2 + 1]
    G[-1] = 0.0
    return np.fft.irfft(G, n=n)


def quadrature(grid: Grid, f) -> float:
    """Periodic trapezoid rule ``dx * sum(f)``."""
    f = check_field(grid, f)
    return float(grid.dx * f.sum())


def inner(grid: Grid, f, g) -> float:
    f = check_field(grid, f)
    g = check_field(grid, g)
    return float(grid.dx * np.dot(f, g))


def symplectic_form(grid: Grid, v1, v2, tol_mean: float | None = None) -> float:
    """``<v1, d_x^{-1} v2>``; ``v2`` must have zero mean."""
    return inner(grid, v1, antiderivative(grid, v2, tol_mean=tol_mean))


def l2_norm(grid: Grid, f) -> float:
    return float(np.sqrt(inner(grid, f, f)))


def h1_norm(grid: Grid, f) -> float:
    fx = spectral_derivative(grid, f, 1)
    return float(np.sqrt(inner(grid, f, f) + inner(grid, fx, fx)))


def periodic_distance(grid: Grid, x, a: float) -> np.ndarray:
    """Signed distance ``x - a`` reduced to ``[-l, l)``."""
    L = grid.length
    return np.mod(np.asarray(x, dtype=float) - a + grid.half_length, L) - grid.half_length


def weighted_h1_norm(grid: Grid, f, a: float, alpha: float) -> float:
    """H1 norm with ``f`` and ``f_x`` both multiplied by ``exp(-alpha |x - a|)``."""
    if alpha <= 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    f = check_field(grid, f)
    weight = np.exp(-alpha * np.abs(periodic_distance(grid, grid.x, a)))
    fx = spectral_derivative(grid, f, 1)
    wf, wfx = weight * f, weight * fx
    return float(np.sqrt(inner(grid, wf, wf) + inner(grid, wfx, wfx)))
