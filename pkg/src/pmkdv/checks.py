"""Quick self-check suites run by ``pmkdv check``.

Each suite returns ``CheckResult`` rows; a suite passes when every row does.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from . import diagnostics as dg
from .errors import ConfigError
from .potential import constant, preset
from .soliton import SolitonParams, d_a_eta, d_c_eta, eta, invariants_on_soliton
from .solver import SnapshotRecorder, SolverConfig, evolve
from .spectral import (Grid, dealiased_cube, forward, inverse, l2_norm, quadrature,
                       spectral_derivative, symplectic_form)
from .tracker import orthogonality_jacobian


class CheckResult(NamedTuple):
    name: str
    value: float
    tolerance: float
    passed: bool

    @classmethod
    def below(cls, name, value, tol):
        return cls(name, float(value), tol, bool(value < tol))

    @classmethod
    def above(cls, name, value, tol):
        return cls(name, float(value), tol, bool(value >= tol))


def brute_force_cube(grid: Grid, u) -> np.ndarray:
    """Exact triple convolution of the Fourier coefficients, truncated to ``|k| < n/2``.

    The Nyquist sample is read as a cosine, split evenly between ``+n/2`` and ``-n/2``.
    """
    n = grid.n
    uh = np.fft.fft(u) / n
    ks = np.fft.fftfreq(n, 1.0 / n).astype(int)
    modes = [(int(k), uh[i]) for i, k in enumerate(ks) if abs(k) < n // 2]
    modes += [(n // 2, 0.5 * uh[n // 2]), (-n // 2, 0.5 * uh[n // 2])]
    coef = {}
    for ki, ci in modes:
        for kj, cj in modes:
            for km, cm in modes:
                k = ki + kj + km
                coef[k] = coef.get(k, 0.0) + ci * cj * cm
    full = np.array([coef.get(int(k), 0.0) if abs(k) < n // 2 else 0.0 for k in ks])
    return np.real(np.fft.ifft(full * n))


def spectral_suite() -> list[CheckResult]:
    g = Grid(64, np.pi)
    rng = np.random.default_rng(0)
    u = rng.standard_normal(g.n)
    rt = np.max(np.abs(inverse(g, forward(g, u)) - u))
    parseval = abs(quadrature(g, u * u) - g.length * np.sum(np.abs(forward(g, u)) ** 2))
    x = g.x
    f = np.sin(3 * x)
    d1 = np.max(np.abs(spectral_derivative(g, f, 1) - 3 * np.cos(3 * x)))
    d3 = np.max(np.abs(spectral_derivative(g, f, 3) + 27 * np.cos(3 * x)))
    g32 = Grid(32, np.pi)
    v = rng.standard_normal(32)
    dealias = np.max(np.abs(dealiased_cube(g32, v) - brute_force_cube(g32, v)))
    return [CheckResult.below("fft round trip", rt, 1e-12),
            CheckResult.below("parseval", parseval, 1e-10),
            CheckResult.below("d/dx sin(3x)", d1, 1e-11),
            CheckResult.below("d3/dx3 sin(3x)", d3, 1e-9),
            CheckResult.below("dealias vs brute force (n=32)", dealias, 1e-12)]


def soliton_suite() -> list[CheckResult]:
    out = []
    for c in (0.5, 1.0, 2.0):
        g = Grid(2048, 60.0 / c)
        u = eta(g, SolitonParams(0.3, c))
        m, p, h = dg.conserved(g, u)
        em, ep, eh = invariants_on_soliton(SolitonParams(0.3, c))
        err = max(abs(m - em), abs(p - ep), abs(h - eh))
        out.append(CheckResult.below(f"(M, P, H0) at c={c:g}", err, 1e-8))
    g = Grid(2048, 30.0)
    p = SolitonParams(0.0, 1.0)
    om = symplectic_form(g, d_a_eta(g, p), d_c_eta(g, p))
    out.append(CheckResult.below("omega(d_a eta, d_c eta) - 1", abs(om - 1.0), 1e-8))
    jac = orthogonality_jacobian(g, eta(g, p), p, normalized=True)
    out.append(CheckResult.below("normalized fit Jacobian - [[0,1],[1,0]]",
                                 np.max(np.abs(jac - np.array([[0, 1], [1, 0]]))), 1e-8))
    return out


def operator_suite() -> list[CheckResult]:
    g = Grid(2048, 40.0)
    p = SolitonParams(0.0, 1.0)
    ex = spectral_derivative(g, eta(g, p), 1)
    ec = d_c_eta(g, p)
    r1 = l2_norm(g, dg.apply_L(g, ex, p)) / l2_norm(g, ex)
    r2 = l2_norm(g, dg.apply_L(g, ec, p) + 2 * p.c * eta(g, p)) / l2_norm(g, ec)
    coer = dg.coercivity_estimate(Grid(512, 20.0), p)
    return [CheckResult.below("|L eta_x| / |eta_x|", r1, 1e-8),
            CheckResult.below("|L eta_c + 2c eta| / |eta_c|", r2, 1e-7),
            CheckResult.above("projected coercivity at c=1", coer, 0.05)]


def weight_suite() -> list[CheckResult]:
    w = dg.VirialWeight()
    out = [CheckResult(k, v, 0.0, ok) for k, (ok, v) in dg.weight_checks(w).items()]
    out.append(CheckResult.below("Phi(1.5) - exp(-0.875)",
                                 abs(float(w.phi(1.5)) - np.exp(-0.875)), 1e-12))
    return out


def balance_suite() -> list[CheckResult]:
    g = Grid(512, 20.0)
    u0 = eta(g, SolitonParams(0.0, 1.0))
    out = []
    rec = SnapshotRecorder()
    evolve(u0, SolverConfig(g, preset("zero"), 0.0, 1e-3, 1.0, 100), rec)
    tri = np.array([dg.conserved(g, u) for u in rec.U])
    drift = np.max(np.abs(tri - tri[0]) / np.abs(tri[0]))
    out.append(CheckResult.below("free-flow drift of (M, P, H0)", drift, 1e-9))
    kappa, gamma, T = -0.5, 0.1, 1.0
    rec = SnapshotRecorder()
    evolve(u0, SolverConfig(g, constant(kappa), gamma, 1e-3, T, 100), rec)
    P = 0.5 * quadrature(g, rec.U[-1] ** 2)
    exact = 0.5 * quadrature(g, u0 * u0) * np.exp(2 * gamma * kappa * T)
    out.append(CheckResult.below("P(T) vs P(0) exp(2 g kappa T)", abs(P - exact) / exact, 1e-6))
    gp = Grid(512, np.pi)
    rec = SnapshotRecorder()
    V = preset("paper-v1")
    evolve(eta(gp, SolitonParams(0.0, 1.0)), SolverConfig(gp, V, 0.01, 1e-4, 0.1, 10), rec)
    rm, rp = dg.balance_residuals(gp, rec.t, rec.U, V, 0.01, relative=True)
    out.append(CheckResult.below("paper-v1 mass balance", rm, 1e-5))
    out.append(CheckResult.below("paper-v1 momentum balance", rp, 1e-5))
    return out


SUITES = {
    "spectral": spectral_suite,
    "soliton": soliton_suite,
    "operator": operator_suite,
    "weight": weight_suite,
    "balance": balance_suite,
}


def run_suite(name: str) -> list[CheckResult]:
    if name == "all":
        return [r for s in SUITES.values() for r in s()]
    try:
        return SUITES[name]()
    except KeyError:
        raise ConfigError(f"unknown check suite {name!r}; known: {sorted(SUITES)} or 'all'") from None


def format_table(rows) -> str:
    width = max(len(r.name) for r in rows)
    lines = [f"{'check':<{width}}  {'value':>12}  {'tol':>9}  status"]
    for r in rows:
        lines.append(f"{r.name:<{width}}  {r.value:12.3e}  {r.tolerance:9.1e}  "
                     f"{'PASS' if r.passed else 'FAIL'}")
    return "\n".join(lines)
