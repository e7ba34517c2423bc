import math

import numpy as np
import pytest

from ditsim import dit_analysis as da
from ditsim import source_model as sm
from ditsim import winter_model as wm

X_OBS = 157.05
FIT_WINDOW = (90.0, 165.0)


def test_config_refinement():
    cfg = wm.WinterConfig()
    fine = cfg.refined(2)
    assert fine.dx == pytest.approx(cfg.dx / 2)
    assert fine.dt == pytest.approx(cfg.dt / 2)
    assert fine.t_max == cfg.t_max


def test_finite_wall_wavenumber_pinned():
    # ground state of k cot(kL) = -sqrt(V - k^2), frozen from an
    # arbitrary-precision solve
    k = wm.finite_wall_wavenumber(3.14, 202.72)
    assert k == pytest.approx(0.97860085671657, abs=1e-10)
    with pytest.raises(wm.TranscendentalSolveError):
        wm.finite_wall_wavenumber(3.14, 0.1)


def test_initial_states_normalized():
    cfg = wm.WinterConfig()
    grid = wm.make_grid(cfg)
    for state in (
        wm.initial_state_infinite(cfg.L, grid),
        wm.initial_state_finite(cfg.L, cfg.V, grid),
    ):
        assert state.norm() == pytest.approx(1.0, abs=1e-9)
        i_out = np.searchsorted(grid.x, 2.0 * cfg.L)
        assert np.abs(state.psi[i_out:]).max() <= 1e-3


def test_norm_conservation(winter_infinite):
    assert winter_infinite.norm_drift <= 1e-8
    assert not winter_infinite.contaminated


def test_trace_silent_before_front(winter_infinite):
    tr = winter_infinite.trace
    # only the weak dispersive forerunner tail precedes the main front
    early = tr[tr[:, 0] < 40.0, 1]
    late = tr[tr[:, 0] > 90.0, 1]
    assert early.max() <= 1e-2 * late.max()


def test_grid_self_convergence(winter_infinite, winter_refined):
    a, b = winter_infinite.trace, winter_refined.trace
    assert a.shape == b.shape
    sa = wm.smoothed_density(a)
    sb = wm.smoothed_density(b)
    m = (a[:, 0] >= FIT_WINDOW[0]) & (a[:, 0] <= FIT_WINDOW[1])
    rel = np.abs(sa[m] - sb[m]) / np.abs(sa[m])
    assert rel.max() <= 0.01


def test_wall_shape_agreement(winter_infinite, winter_finite):
    scale, max_rel, _ = wm.shape_difference(
        winter_infinite.trace, winter_finite.trace, FIT_WINDOW
    )
    assert 0.8 <= scale <= 1.2
    assert max_rel <= 0.05


def test_maxima_match_source_model(winter_infinite):
    # oscillation times of the delta-barrier trace against the decaying
    # point-source prediction with the fitted carrier
    fit = wm.fit_source_model(winter_infinite.trace, FIT_WINDOW, X_OBS)
    c = sm.make_carrier(min(fit.k0I_fit, -1e-12))
    peaks = wm.trace_extrema(winter_infinite.trace, FIT_WINDOW, "maxima")
    assert len(peaks) >= 7
    t_meas = [p[0] for p in peaks]
    t_pred = [da.predict_Tn(c, X_OBS, n) for n in range(len(peaks) + 1)]
    for n in range(1, 6):
        gap_m = t_meas[n + 1] - t_meas[n]
        gap_p = t_pred[n + 1] - t_pred[n]
        assert abs(gap_m - gap_p) / gap_p <= 0.03


def test_fit_residual_decreases_with_barrier_strength(
    winter_infinite, winter_u500, winter_u2000
):
    res = []
    for result in (winter_infinite, winter_u500, winter_u2000):
        fit = wm.fit_source_model(result.trace, FIT_WINDOW, X_OBS)
        res.append(wm.overlay_residual(result.trace, fit, X_OBS, FIT_WINDOW))
    assert res[0] > res[1] > res[2]


def test_fit_round_trip_on_synthetic_trace():
    # a pure source-model trace must fit back to its own carrier
    k0I = -0.003
    c = sm.make_carrier(k0I)
    t = np.arange(60.0, 400.0, 0.05)
    trace = sm.density_trace(c, 100.0, t)
    fit = wm.fit_source_model(trace, (120.0, 390.0), 100.0)
    assert fit.k0I_fit == pytest.approx(k0I, rel=1e-2)
    res = wm.overlay_residual(trace, fit, 100.0, (120.0, 390.0))
    assert res <= 0.2


def test_fit_window_validation(winter_infinite):
    tr = winter_infinite.trace
    with pytest.raises(wm.FitWindowError):
        wm.fit_source_model(tr, (90.0, 95.0), X_OBS)
    with pytest.raises(wm.FitWindowError):
        wm.fit_source_model(tr, (1000.0, 2000.0), X_OBS)


def test_trace_extrema_validation(winter_infinite):
    with pytest.raises(ValueError):
        wm.trace_extrema(winter_infinite.trace, FIT_WINDOW, "mode")
    assert wm.trace_extrema(winter_infinite.trace, (0.0, 1.0)) == []


def test_barrier_opacity_scaling(winter_infinite, winter_u500, winter_u2000):
    # transmitted amplitude falls roughly as 1/U^2
    p1 = winter_infinite.trace[:, 1].max()
    p2 = winter_u500.trace[:, 1].max()
    p3 = winter_u2000.trace[:, 1].max()
    assert p1 > 5.0 * p2 > 5.0 * p3
    assert p2 / p3 == pytest.approx((2000.0 / 500.0) ** 2, rel=0.35)
