import numpy as np
import pytest
from sklearn.base import clone

from pmkdv.errors import NoConvergence, ZeroField
from pmkdv.potential import preset
from pmkdv.soliton import SolitonParams, eta
from pmkdv.solver import SnapshotRecorder, SolverConfig, evolve
from pmkdv.spectral import Grid
from pmkdv.tracker import (SolitonFitter, modulation_residuals, moment_estimate,
                           orthogonality_jacobian, orthogonality_residuals, symplectic_fit,
                           track)
from pmkdv.trajectory import Trajectory


@pytest.fixture
def grid():
    return Grid(1024, 20.0)


def test_moment_estimate_on_soliton(grid):
    p = moment_estimate(grid, eta(grid, SolitonParams(2.0, 1.5)))
    assert abs(p.c - 1.5) < 1e-10
    assert abs(p.a - 2.0) < 1e-3


def test_moment_estimate_rejects_zero(grid):
    with pytest.raises(ZeroField):
        moment_estimate(grid, np.zeros(grid.n))


@pytest.mark.parametrize("a,c", [(0.0, 1.0), (-7.3, 0.8), (19.5, 2.0)])
def test_fit_recovers_soliton(grid, a, c):
    u = eta(grid, SolitonParams(a, c))
    fit = symplectic_fit(grid, u, moment_estimate(grid, u))
    d = (fit.params.a - a + 20.0) % 40.0 - 20.0
    assert abs(d) < 1e-9 and abs(fit.params.c - c) < 1e-9
    assert fit.deviation_h1 < 1e-8


def test_fit_is_idempotent(grid):
    rng = np.random.default_rng(1)
    u = eta(grid, SolitonParams(1.0, 1.2)) + 0.01 * np.cos(3 * np.pi * grid.x / 20)
    u += 1e-3 * rng.standard_normal(grid.n)
    p1 = symplectic_fit(grid, u, moment_estimate(grid, u)).params
    p2 = symplectic_fit(grid, u, p1).params
    assert abs(p1.a - p2.a) < 1e-12 and abs(p1.c - p2.c) < 1e-12
    assert np.max(np.abs(orthogonality_residuals(grid, u, p1))) < 1e-10


def test_jacobian_matches_finite_differences(grid):
    u = eta(grid, SolitonParams(0.2, 1.1)) + 0.05 * np.exp(-(grid.x - 1) ** 2)
    p = SolitonParams(0.25, 1.05)
    jac = orthogonality_jacobian(grid, u, p)
    h = 1e-6
    fd = np.column_stack([
        (orthogonality_residuals(grid, u, SolitonParams(p.a + h, p.c))
         - orthogonality_residuals(grid, u, SolitonParams(p.a - h, p.c))) / (2 * h),
        (orthogonality_residuals(grid, u, SolitonParams(p.a, p.c + h))
         - orthogonality_residuals(grid, u, SolitonParams(p.a, p.c - h))) / (2 * h)])
    assert np.max(np.abs(jac - fd)) < 1e-7


def test_normalized_jacobian_on_manifold():
    g = Grid(2048, 30.0)
    p = SolitonParams(0.0, 1.0)
    jac = orthogonality_jacobian(g, eta(g, p), p, normalized=True)
    assert np.max(np.abs(jac - [[0, 1], [1, 0]])) < 1e-8


def test_fit_failure_reports_history(grid):
    u = eta(grid, SolitonParams(5.0, 1.0))
    with pytest.raises(NoConvergence) as exc:
        symplectic_fit(grid, u, SolitonParams(0.0, 1.0), max_iter=0)
    assert exc.value.history


def _free_run(grid, t_final=2.0):
    rec = SnapshotRecorder()
    cfg = SolverConfig(grid, preset("zero"), 0.0, 5e-4, t_final, 200)
    evolve(eta(grid, SolitonParams(18.0, 1.5)), cfg, rec)
    return rec


def test_track_unwraps_across_seam(grid):
    rec = _free_run(grid, 2.0)
    tr = track(grid, rec)
    assert tr.complete
    assert np.all(np.diff(tr.a) > 0)
    assert abs(tr.a[-1] - (18.0 + 1.5**2 * 2.0)) < 1e-5


def test_modulation_residuals_vanish_for_free_flow(grid):
    tr = track(grid, _free_run(grid, 1.0))
    ra, rc = modulation_residuals(tr, preset("zero"), 0.0)
    assert np.max(np.abs(ra)) < 1e-6 and np.max(np.abs(rc)) < 1e-6


def test_estimator_api(grid):
    rec = _free_run(grid, 1.0)
    est = SolitonFitter(grid)
    assert clone(est).get_params()["max_iter"] == 50
    est.fit(rec.U, t=rec.t)
    assert isinstance(est.trajectory_, Trajectory)
    assert est.params_.shape == (len(rec), 2)
    P = est.transform(rec.U[:3])
    assert np.allclose(P[:, 1], 1.5, atol=1e-8)
    back = est.inverse_transform(P)
    assert back.shape == (3, grid.n)
    assert np.max(np.abs(back - rec.U[:3])) < 1e-6


def test_estimator_requires_fit(grid):
    from sklearn.exceptions import NotFittedError
    with pytest.raises(NotFittedError):
        SolitonFitter(grid).transform(np.zeros((1, grid.n)))
