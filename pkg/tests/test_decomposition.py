import numpy as np
import pytest

from ditsim import decomposition as dc
from ditsim import source_model as sm


@pytest.fixture(scope="module")
def carrier():
    return sm.make_carrier(-0.0015)


def test_pole_onset_time(carrier):
    assert dc.pole_onset_time(carrier, 1000.0) == pytest.approx(
        1000.0 / (2.0 * (1.0 - 0.0015))
    )
    assert dc.pole_onset_time(carrier, 0.0) == 0.0


def test_pole_gate_flips_at_onset(carrier):
    x = 1000.0
    t_c = dc.pole_onset_time(carrier, x)
    before = sm.make_point(carrier, x, t_c * 0.99)
    after = sm.make_point(carrier, x, t_c * 1.01)
    assert not dc.pole_term(carrier, before)[1]
    assert dc.pole_term(carrier, after)[1]
    assert dc.interference_term(carrier, before) == 0.0
    assert dc.interference_term(carrier, after) != 0.0


def test_interference_routes_agree(carrier):
    # explicit trigonometric form vs 2 Re[psi_s psi_0*]
    x = 1000.0
    for t in np.linspace(520.0, 1200.0, 200):
        p = sm.make_point(carrier, x, t)
        a = dc._interference_explicit(carrier, p)
        b = dc._interference_product(carrier, p)
        assert abs(a - b) <= 1e-10 * max(abs(a), abs(b), 1e-12)


def test_approx_matches_exact_outside_tau_window(carrier, fig1_grid):
    x = 1000.0
    tau_abs = abs(x / (2.0 * carrier.k0))
    exact = sm.density_trace(carrier, x, fig1_grid)[:, 1]
    approx = np.array(
        [
            dc.approx_density(carrier, sm.make_point(carrier, x, t)).approx_density
            for t in fig1_grid
        ]
    )
    mask = (fig1_grid < 0.8 * tau_abs) | (fig1_grid > 1.2 * tau_abs)
    rel = np.abs(approx[mask] - exact[mask]) / np.abs(exact[mask])
    assert rel.max() <= 0.02


def _count_local_maxima(y):
    return int(np.sum((y[1:-1] > y[:-2]) & (y[1:-1] > y[2:])))


def test_oscillations_live_only_in_cross_term(carrier, fig1_grid):
    x = 1000.0
    saddle = np.empty(fig1_grid.size)
    pole = np.empty(fig1_grid.size)
    inter = np.empty(fig1_grid.size)
    for i, t in enumerate(fig1_grid):
        d = dc.approx_density(carrier, sm.make_point(carrier, x, t))
        saddle[i] = abs(d.saddle) ** 2
        pole[i] = abs(d.pole) ** 2 if d.pole_active else 0.0
        inter[i] = d.interference
    assert _count_local_maxima(saddle) <= 1
    assert _count_local_maxima(pole) <= 1
    assert _count_local_maxima(inter) > 10


def test_saddle_singularity_warning():
    # only a non-decaying carrier has a real tau, so only there can t
    # actually hit the t^2 = tau^2 singularity
    c0 = sm.make_carrier(0.0)
    x = 1000.0
    p = sm.make_point(c0, x, (x / 2.0) * (1.0 + 1e-12))
    with pytest.warns(dc.SaddleSingularityWarning):
        dc.saddle_term(c0, p)


def test_interference_factors(carrier):
    p = sm.make_point(carrier, 1000.0, 600.0)
    fac = dc.interference_factors(carrier, p)
    assert fac.phi == pytest.approx(
        (carrier.omega0R + p.ks**2) * 600.0 - 1000.0 - 0.75 * np.pi
    )
    assert fac.beta == pytest.approx(
        np.exp(carrier.omega0I * 600.0 - carrier.k0I * 1000.0)
    )
