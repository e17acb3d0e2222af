"""Soliton parameter extraction from PDE fields.

A moment estimate seeds a damped Newton solve of the orthogonality
conditions ``<u - eta, eta> = <u - eta, (x - a) eta> = 0``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .effective import bracket_vee, bracket_vxe
from .errors import NoConvergence, ZeroField
from .soliton import SolitonParams, d_a_eta, d_c_eta, eta
from .spectral import Grid, h1_norm, inner, l2_norm, periodic_distance, quadrature
from .trajectory import Trajectory
from .validation import check_field, check_fields, check_uniform_times

logger = logging.getLogger(__name__)

TRACK_COLUMNS = ("t", "a_unwrapped", "c", "r1", "r2", "deviation_h1", "iterations")


@dataclass(frozen=True)
class FitResult:
    params: SolitonParams
    residuals: tuple[float, float]
    iterations: int
    deviation_h1: float
    history: list = field(default_factory=list, repr=False)


def moment_estimate(grid: Grid, u) -> SolitonParams:
    """``c = (1/2) int u^2`` and ``a`` = circular centroid of ``u^2``."""
    u = check_field(grid, u, "u")
    rho = u * u
    mass = quadrature(grid, rho)
    if mass <= 0:
        raise ZeroField("cannot estimate soliton parameters of a zero field")
    ell = grid.half_length
    z = quadrature(grid, rho * np.cos(np.pi * grid.x / ell)) + \
        1j * quadrature(grid, rho * np.sin(np.pi * grid.x / ell))
    return SolitonParams(ell / np.pi * np.angle(z), 0.5 * mass)


SEAM_WIDTH = 4.0


def moment_weight(grid: Grid, a: float, seam_width: float = SEAM_WIDTH):
    """Seam-tapered offset ``tau(x - a)`` and its derivative in ``x``.

    ``tau(d) = d * (1 - exp(-((l - |d|) / (seam_width * dx))**2))`` equals
    ``x - a`` away from the antipode of ``a`` and vanishes to second order
    there, so pairings against it stay smooth in ``a`` as grid points cross
    the seam. The change is of the size of the soliton tail at the seam.
    """
    d = periodic_distance(grid, grid.x, a)
    delta = seam_width * grid.dx
    s = (grid.half_length - np.abs(d)) / delta
    g = np.exp(-s * s)
    m = 1.0 - g
    # d/dd of m is -2 s g sign(d) / delta
    tau = d * m
    dtau = m - 2.0 * np.abs(d) * s * g / delta
    return tau, dtau


def orthogonality_residuals(grid: Grid, u, p: SolitonParams) -> np.ndarray:
    """``(<w, eta>, <w, (x - a) eta>)`` with ``w = u - eta(a, c)``."""
    e = eta(grid, p)
    w = u - e
    tau, _ = moment_weight(grid, p.a)
    return np.array([inner(grid, w, e), inner(grid, w, tau * e)])


def orthogonality_jacobian(grid: Grid, u, p: SolitonParams, normalized: bool = False):
    """Jacobian of :func:`orthogonality_residuals` with respect to ``(a, c)``.

    With ``normalized=True`` the rows are rescaled by ``-1`` and ``-1/c``,
    which turns the value at ``u = eta(a, c)`` into ``[[0, 1], [1, 0]]``.
    """
    e = eta(grid, p)
    ea = d_a_eta(grid, p)
    ec = d_c_eta(grid, p)
    tau, dtau = moment_weight(grid, p.a)
    w = u - e
    jac = np.array([
        [-inner(grid, ea, e) + inner(grid, w, ea),
         -inner(grid, ec, e) + inner(grid, w, ec)],
        [-inner(grid, ea, tau * e) + inner(grid, w, tau * ea - dtau * e),
         -inner(grid, ec, tau * e) + inner(grid, w, tau * ec)],
    ])
    if normalized:
        jac = np.diag([-1.0, -1.0 / p.c]) @ jac
    return jac


def symplectic_fit(grid: Grid, u, init: SolitonParams, fit_tol: float | None = None,
                   max_iter: int = 50) -> FitResult:
    """Damped Newton solve of the orthogonality conditions starting at ``init``.

    ``fit_tol`` defaults to ``1e-10 * ||u||_2``. Raises :class:`NoConvergence`
    with the residual history when the iteration fails.
    """
    u = check_field(grid, u, "u")
    if fit_tol is None:
        fit_tol = 1e-10 * l2_norm(grid, u)
    x = np.array([init.a, init.c], dtype=float)
    r = orthogonality_residuals(grid, u, init)
    res = np.max(np.abs(r))
    history = [res]
    it = 0
    polished = False
    while True:
        if res < fit_tol:
            if polished:
                break
            polished = True
        elif it >= max_iter:
            raise NoConvergence(f"orthogonality fit stalled at residual {res:.3e}",
                                history=history)
        p = SolitonParams(x[0], x[1])
        jac = orthogonality_jacobian(grid, u, p)
        try:
            delta = -np.linalg.solve(jac, r)
        except np.linalg.LinAlgError:
            raise NoConvergence("singular orthogonality Jacobian", history=history) from None
        lam = 1.0
        accepted = False
        for _ in range(30):
            trial = x + lam * delta
            if trial[1] > 0:
                rt = orthogonality_residuals(grid, u, SolitonParams(*trial))
                rest = np.max(np.abs(rt))
                if rest < res or (polished and rest <= res):
                    accepted = True
                    break
            lam *= 0.5
        it += 1
        if not accepted:
            if polished:
                break
            raise NoConvergence(f"Newton line search failed at residual {res:.3e}",
                                history=history)
        x, r, res = trial, rt, rest
        history.append(res)
    p = SolitonParams(x[0], x[1])
    w = u - eta(grid, p)
    return FitResult(p, (float(r[0]), float(r[1])), it, h1_norm(grid, w), history)


def _wrap_near(grid: Grid, a: float, ref: float) -> float:
    return ref + float(periodic_distance(grid, a, ref))


def track(grid: Grid, snapshots, init: SolitonParams | None = None,
          fit_tol: float | None = None, max_iter: int = 50) -> Trajectory:
    """Fit every snapshot ``(t, u)`` in order, warm-starting from the previous fit.

    Positions are unwrapped onto the real line. A failed fit ends the track;
    the returned trajectory then has ``failure`` set to the failing time.
    """
    ts, a_s, c_s = [], [], []
    cols = {k: [] for k in TRACK_COLUMNS[3:]}
    prev = init
    a_ref = None
    failure = None
    last_t = None
    for t, u in snapshots:
        if last_t is not None and t < last_t:
            raise ValueError("snapshots must be time-ordered")
        last_t = t
        start = prev if prev is not None else moment_estimate(grid, u)
        try:
            fit = symplectic_fit(grid, u, start, fit_tol=fit_tol, max_iter=max_iter)
        except NoConvergence as exc:
            logger.warning("track stopped at t=%.6g: %s", t, exc)
            failure = float(t)
            break
        a = fit.params.a if a_ref is None else _wrap_near(grid, fit.params.a, a_ref)
        a_ref = a
        prev = fit.params
        ts.append(float(t))
        a_s.append(a)
        c_s.append(fit.params.c)
        cols["r1"].append(fit.residuals[0])
        cols["r2"].append(fit.residuals[1])
        cols["deviation_h1"].append(fit.deviation_h1)
        cols["iterations"].append(fit.iterations)
    return Trajectory(ts, a_s, c_s, cols, failure=failure)


def modulation_residuals(track: Trajectory, potential, epsilon: float, **bracket_kw):
    """``rho_a = a' - c^2 - eps <V eta, (x-a) eta>/c`` and ``rho_c = c' - eps <V eta, eta>``.

    Derivatives are second-order finite differences of the fitted track.
    """
    h = check_uniform_times(track.t, 3)
    adot = np.gradient(track.a, h, edge_order=2)
    cdot = np.gradient(track.c, h, edge_order=2)
    vee = np.empty(len(track))
    vxe = np.empty(len(track))
    for i, (a, c) in enumerate(zip(track.a, track.c)):
        p = SolitonParams(a, c)
        vee[i] = bracket_vee(potential, p, **bracket_kw)
        vxe[i] = bracket_vxe(potential, p, **bracket_kw)
    rho_a = adot - track.c**2 - epsilon * vxe / track.c
    rho_c = cdot - epsilon * vee
    return rho_a, rho_c


class SolitonFitter(TransformerMixin, BaseEstimator):
    """Estimator mapping soliton-like fields to orthogonality-fitted ``(a, c)``.

    ``fit`` tracks a time-ordered stack of fields with warm starts and keeps
    the unwrapped trajectory; ``transform`` fits each row independently from
    its moment estimate; ``inverse_transform`` samples ``eta`` at given
    parameters.
    """

    def __init__(self, grid: Grid, fit_tol=None, max_iter=50):
        self.grid = grid
        self.fit_tol = fit_tol
        self.max_iter = max_iter

    def fit(self, X, y=None, t=None):
        U = check_fields(self.grid, X)
        t = np.arange(U.shape[0], dtype=float) if t is None else np.asarray(t, dtype=float)
        traj = track(self.grid, zip(t, U), fit_tol=self.fit_tol, max_iter=self.max_iter)
        if not traj.complete:
            raise NoConvergence(f"fit failed at t={traj.failure}", t=traj.failure, partial=traj)
        self.trajectory_ = traj
        self.params_ = np.column_stack([traj.a, traj.c])
        self.n_features_in_ = self.grid.n
        return self

    def transform(self, X):
        check_is_fitted(self, "params_")
        U = check_fields(self.grid, X)
        out = np.empty((U.shape[0], 2))
        for i, u in enumerate(U):
            res = symplectic_fit(self.grid, u, moment_estimate(self.grid, u),
                                 fit_tol=self.fit_tol, max_iter=self.max_iter)
            out[i] = res.params.as_array()
        return out

    def inverse_transform(self, P):
        P = np.atleast_2d(np.asarray(P, dtype=float))
        return np.array([eta(self.grid, SolitonParams(a, c)) for a, c in P])
