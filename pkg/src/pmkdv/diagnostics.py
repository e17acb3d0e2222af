"""Functionals used to monitor a run: conserved quantities, balance laws,
forcing projections, the linearised operator and its coercivity, the
local virial weight and the energy functional, plus envelope fits.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import integrate as sp_integrate
from scipy import optimize
from scipy.sparse.linalg import LinearOperator, cg

from .effective import bracket_vee, bracket_vxe
from .errors import InsufficientPoints, NoConvergence
from .potential import PotentialSpec
from .soliton import SolitonParams, d_a_eta, d_c_eta, eta, symplectic_pairings
from .spectral import Grid, inner, periodic_distance, quadrature, spectral_derivative
from .validation import check_field, check_uniform_times


class ConservedTriple(NamedTuple):
    mass: float
    momentum: float
    hamiltonian: float


def conserved(grid: Grid, u) -> ConservedTriple:
    """``M = int u``, ``P = (1/2) int u^2``, ``H0 = (1/2) int (u_x^2 - u^4)``."""
    u = check_field(grid, u, "u")
    ux = spectral_derivative(grid, u, 1)
    return ConservedTriple(quadrature(grid, u), 0.5 * inner(grid, u, u),
                           0.5 * quadrature(grid, ux * ux - u**4))


def balance_residuals(grid: Grid, times, fields, potential: PotentialSpec,
                      coupling: float, relative: bool = False):
    """Defects of ``dM/dt = g int V u`` and ``dP/dt = g int V u^2`` at the last time.

    The right sides are integrated with Simpson's rule over the snapshot
    times. With ``relative=True`` the defects are divided by ``|M(0)|`` and
    ``P(0)``.
    """
    check_uniform_times(times, 3)
    t = np.asarray(times, dtype=float)
    v = potential.sample(grid)
    M = np.array([quadrature(grid, u) for u in fields])
    P = np.array([0.5 * inner(grid, u, u) for u in fields])
    fm = coupling * np.array([quadrature(grid, v * u) for u in fields])
    fp = coupling * np.array([quadrature(grid, v * u * u) for u in fields])
    rm = abs(M[-1] - M[0] - sp_integrate.simpson(fm, x=t))
    rp = abs(P[-1] - P[0] - sp_integrate.simpson(fp, x=t))
    if relative:
        rm /= max(abs(M[0]), np.finfo(float).tiny)
        rp /= max(P[0], np.finfo(float).tiny)
    return rm, rp


def deviation(grid: Grid, u, p: SolitonParams) -> np.ndarray:
    """``w = u - eta(., a, c)``."""
    return check_field(grid, u, "u") - eta(grid, p)


class ForcingProjection(NamedTuple):
    alpha_a: float
    alpha_c: float
    orthogonal: np.ndarray


def f0_projections(grid: Grid, p: SolitonParams, adot: float, cdot: float,
                   potential: PotentialSpec, epsilon: float) -> ForcingProjection:
    """Split ``F0 = (a' - c^2) d_a eta + c' d_c eta - eps V eta`` along the tangent space.

    Returns the tangent coefficients and the symplectically orthogonal part.
    """
    e = eta(grid, p)
    pair = symplectic_pairings(grid, p)
    ve = potential.sample(grid) * e
    s_c = inner(grid, ve, pair.j_inv_dc)
    s_a = inner(grid, ve, pair.j_inv_da)
    alpha_a = adot - p.c**2 - epsilon * s_c
    alpha_c = cdot + epsilon * s_a
    perp = -epsilon * ve + epsilon * s_c * d_a_eta(grid, p) - epsilon * s_a * d_c_eta(grid, p)
    return ForcingProjection(alpha_a, alpha_c, perp)


def f0_projections_line(p: SolitonParams, adot: float, cdot: float,
                        potential: PotentialSpec, epsilon: float) -> tuple[float, float]:
    """Tangent coefficients of ``F0`` with the brackets taken on the real line."""
    alpha_a = adot - p.c**2 - epsilon * bracket_vxe(potential, p) / p.c
    alpha_c = cdot - epsilon * bracket_vee(potential, p)
    return alpha_a, alpha_c


# linearised operator ------------------------------------------------------

def apply_L(grid: Grid, w, p: SolitonParams) -> np.ndarray:
    """``L w = -w_xx - 6 eta^2 w + c^2 w``."""
    w = check_field(grid, w, "w")
    e = eta(grid, p)
    return -spectral_derivative(grid, w, 2) + (p.c**2 - 6.0 * e * e) * w


def _coercivity_setup(grid: Grid, p: SolitonParams):
    n = grid.n
    kr = grid.kr
    bhalf = np.sqrt(1.0 + kr**2)
    def b_pow(f, s):
        return np.fft.irfft(np.fft.rfft(f) * bhalf**s, n=n)
    e = eta(grid, p)
    d = periodic_distance(grid, grid.x, p.a)
    # constraints <w, g> = 0 become <z, B^{-1/2} g> = 0 for z = B^{1/2} w
    G = np.column_stack([b_pow(e, -1.0), b_pow(d * e, -1.0)])
    Qc, _ = np.linalg.qr(G)
    def project(z):
        return z - Qc @ (Qc.T @ z)
    pot = p.c**2 - 6.0 * e * e
    def S(z):
        w = b_pow(z, -1.0)
        return b_pow(-spectral_derivative(grid, w, 2) + pot * w, -1.0)
    return S, project, b_pow


def coercivity_estimate(grid: Grid, p: SolitonParams, tol: float = 1e-8,
                        max_iter: int = 500, seed: int = 0) -> float:
    """Minimum of ``<L w, w> / ||w||_{H1}^2`` subject to ``<w, eta> = <w, (x-a) eta> = 0``.

    Inverse power iteration on ``S = B^{-1/2} L B^{-1/2}`` (``B = 1 - d_x^2``)
    restricted to the constraint complement; each inverse is a projected
    conjugate-gradient solve.
    """
    S, project, _ = _coercivity_setup(grid, p)
    n = grid.n
    op = LinearOperator((n, n), matvec=lambda z: project(S(project(z))), dtype=float)
    rng = np.random.default_rng(seed)
    z = project(rng.standard_normal(n))
    z /= np.linalg.norm(z)
    lam = np.dot(z, S(z))
    history = [lam]
    for _ in range(max_iter):
        y, info = cg(op, z, rtol=1e-12, atol=0.0, maxiter=10 * n)
        if info < 0:
            raise NoConvergence("inner CG solve failed", history=history)
        y = project(y)
        z = y / np.linalg.norm(y)
        lam_new = float(np.dot(z, S(z)))
        history.append(lam_new)
        if abs(lam_new - lam) < tol * max(1.0, abs(lam_new)):
            return lam_new
        lam = lam_new
    raise NoConvergence("coercivity inverse iteration did not converge", history=history)


def coercivity_dense(grid: Grid, p: SolitonParams) -> float:
    """Dense-matrix version of :func:`coercivity_estimate` (``n <= 256``)."""
    if grid.n > 256:
        raise ValueError("dense coercivity check is limited to n <= 256")
    S, project, _ = _coercivity_setup(grid, p)
    n = grid.n
    eye = np.eye(n)
    Smat = np.column_stack([S(eye[:, j]) for j in range(n)])
    Smat = 0.5 * (Smat + Smat.T)
    Pm = np.column_stack([project(eye[:, j]) for j in range(n)])
    # orthonormal basis of the constraint complement
    U, s, _ = np.linalg.svd(Pm)
    basis = U[:, s > 0.5]
    return float(np.linalg.eigvalsh(basis.T @ Smat @ basis)[0])


def energy_functional(grid: Grid, w, p: SolitonParams) -> float:
    """``(1/2) <L w, w> - 2 int eta w^3 - (1/2) int w^4``."""
    w = check_field(grid, w, "w")
    e = eta(grid, p)
    return 0.5 * inner(grid, apply_L(grid, w, p), w) - 2.0 * quadrature(grid, e * w**3) \
        - 0.5 * quadrature(grid, w**4)


# virial weight ------------------------------------------------------------

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(40)


def _bridge_exponent(s):
    t = s - 1.0
    return 5.0 * t * t - 3.0 * t**3


@dataclass(frozen=True)
class VirialWeight:
    """Even cutoff ``Phi`` with ``Phi = 1`` on ``[0, 1]``, ``exp(-x)`` beyond 2.

    On ``[1, 2]``, ``Phi = exp(-r(x))`` with the Hermite cubic
    ``r(1 + t) = 5 t^2 - 3 t^3``. ``Psi`` is the odd primitive of ``Phi`` and
    ``Psi_A(x) = A Psi(x / A)``.
    """

    A: float = 10.0

    def __post_init__(self):
        if not self.A > 0:
            raise ValueError(f"A must be positive, got {self.A}")

    @staticmethod
    def phi(x):
        s = np.abs(np.asarray(x, dtype=float))
        out = np.where(s <= 1.0, 1.0, np.exp(-s))
        mid = (s > 1.0) & (s < 2.0)
        return np.where(mid, np.exp(-_bridge_exponent(np.clip(s, 1.0, 2.0))), out)

    @staticmethod
    def phi_prime(x):
        x = np.asarray(x, dtype=float)
        s = np.abs(x)
        t = np.clip(s, 1.0, 2.0) - 1.0
        bridge = -(10.0 * t - 9.0 * t * t) * np.exp(-_bridge_exponent(1.0 + t))
        d = np.where(s <= 1.0, 0.0, np.where(s < 2.0, bridge, -np.exp(-s)))
        return np.sign(x) * d

    @staticmethod
    def _bridge_integral(s):
        # int_1^s Phi for s in [1, 2], Gauss-Legendre on [1, s]
        s = np.asarray(s, dtype=float)
        half = 0.5 * (s - 1.0)
        nodes = 1.0 + half[..., None] * (_GL_NODES + 1.0)
        return half * np.sum(_GL_WEIGHTS * np.exp(-_bridge_exponent(nodes)), axis=-1)

    @classmethod
    def psi(cls, x):
        x = np.asarray(x, dtype=float)
        s = np.abs(x)
        full = 1.0 + cls._bridge_integral(np.array(2.0))
        val = np.where(
            s <= 1.0, s,
            np.where(s < 2.0, 1.0 + cls._bridge_integral(np.clip(s, 1.0, 2.0)),
                     full + np.exp(-2.0) - np.exp(-s)))
        return np.sign(x) * val

    @classmethod
    def psi_limit(cls) -> float:
        """``int_0^inf Phi``."""
        return float(1.0 + cls._bridge_integral(np.array(2.0)) + np.exp(-2.0))

    def psi_A(self, x):
        return self.A * self.psi(np.asarray(x, dtype=float) / self.A)

    @property
    def alpha(self) -> float:
        """Default weighted-norm decay ``1 / (2 A)``."""
        return 0.5 / self.A


def weight_checks(weight: VirialWeight | None = None, n_samples: int = 100_000,
                  upper: float = 50.0) -> dict:
    """Dense-sample the defining properties of ``Phi`` and the oddness of ``Psi``.

    Returns ``{name: (passed, worst_violation)}``.
    """
    weight = weight or VirialWeight()
    x = np.linspace(0.0, upper, n_samples)
    phi = weight.phi(x)
    out = {}
    out["even"] = np.max(np.abs(weight.phi(-x) - phi))
    dphi = weight.phi_prime(x[x > 0])
    out["nonincreasing"] = max(0.0, float(np.max(dphi)), float(np.max(np.diff(phi))))
    on01 = x <= 1.0
    out["one_on_[0,1]"] = np.max(np.abs(phi[on01] - 1.0))
    beyond = x >= 2.0
    out["exp_on_[2,inf)"] = np.max(np.abs(phi[beyond] - np.exp(-x[beyond])) / np.exp(-x[beyond]))
    lower = np.exp(-x)
    out["sandwich"] = max(0.0, float(np.max(lower - phi)), float(np.max(phi - 3.0 * lower)))
    xs = np.linspace(-upper, upper, 2001)
    psi = weight.psi(xs)
    out["psi_odd"] = np.max(np.abs(weight.psi(-xs) + psi))
    tol = {"even": 0.0, "nonincreasing": 0.0, "one_on_[0,1]": 1e-12,
           "exp_on_[2,inf)": 1e-12, "sandwich": 0.0, "psi_odd": 1e-12}
    return {k: (bool(v <= tol[k]), float(v)) for k, v in out.items()}


def virial_functional(grid: Grid, w, p: SolitonParams, weight: VirialWeight | None = None) -> float:
    """``int Psi_A(x - a) w^2 dx`` with the periodic signed distance."""
    weight = weight or VirialWeight()
    w = check_field(grid, w, "w")
    d = periodic_distance(grid, grid.x, p.a)
    return quadrature(grid, weight.psi_A(d) * w * w)


# stability envelopes ------------------------------------------------------

@dataclass
class EnvelopeFit:
    C: float
    margin: np.ndarray
    demand: np.ndarray
    lhs: np.ndarray


def _min_constant(lhs, base, rate):
    # smallest C with lhs <= C * base * exp(C * rate)
    if lhs <= 0:
        return 0.0
    f = lambda C: np.log(C) + np.log(base) + C * rate - np.log(lhs)
    lo, hi = 1e-300, max(1.0, lhs / base)
    while f(hi) < 0:
        hi *= 2.0
    if rate == 0.0:
        return lhs / base
    return optimize.brentq(f, lo, hi, xtol=1e-14, rtol=1e-12)


def stability_envelopes(times, w_h1, w_weighted, epsilon: float, omega: float,
                      exponent: str = "orbital") -> EnvelopeFit:
    """Fit the smallest ``C`` with ``N(t) <= C (omega + eps t^{1/2}) exp(C r t)``.

    ``N(t) = sup_{s<=t} ||w(s)||_{H1} + (int_0^t ||e^{-alpha|x-a|} w||_{H1}^2)^{1/2}``.
    ``exponent="orbital"`` uses ``r = eps``; ``"predictive"`` uses ``r = eps^{1/2}``.
    ``demand`` is the per-time minimal constant; ``margin`` is
    ``C * envelope - N``.
    """
    t = np.asarray(times, dtype=float)
    if t.size < 2:
        raise InsufficientPoints("need at least two samples")
    w_h1 = np.asarray(w_h1, dtype=float)
    w_weighted = np.asarray(w_weighted, dtype=float)
    sup = np.maximum.accumulate(w_h1)
    local = np.concatenate([[0.0], sp_integrate.cumulative_trapezoid(w_weighted**2, t)])
    lhs = sup + np.sqrt(local)
    rate = {"orbital": epsilon, "predictive": np.sqrt(epsilon)}[exponent]
    base = omega + epsilon * np.sqrt(np.abs(t - t[0]))
    demand = np.zeros_like(t)
    usable = base > 0
    for i in np.flatnonzero(usable):
        demand[i] = _min_constant(lhs[i], base[i], rate * abs(t[i] - t[0]))
    C = float(demand.max()) if usable.any() else 0.0
    env = C * base * np.exp(C * rate * np.abs(t - t[0]))
    return EnvelopeFit(C, env - lhs, demand, lhs)
