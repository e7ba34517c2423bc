"""Quantitative DIT phenomenology.

Predicted maxima times T_n, numerically located extrema of the exact
density, the first-maximum trajectory, visibility Delta over a
(k0I, x) grid, and the observability bound solving T_1 - T_0 < N*tau0.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import source_model as sm
from .decomposition import pole_onset_time

log = logging.getLogger(__name__)

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class NegativeDiscriminantError(ValueError):
    """Eq.-predicted maximum does not exist for this (n, x)."""


class ObservabilityNoSolutionError(ValueError):
    """T_1 - T_0 exceeds N*tau0 already at x = 0."""


@dataclass(frozen=True)
class MaximaRecord:
    n: int
    t_predicted: float
    t_measured: float
    interval_predicted: float  # T_{n+1} - T_n
    interval_measured: float


@dataclass(frozen=True)
class VisibilityPoint:
    k0I: float
    x: float
    delta: float


def predict_Tn(c, x, n):
    """Predicted time of the n-th density maximum (n = 0: principal)."""
    if n < 0:
        raise ValueError("n must be >= 0")
    a = (3.0 + 8.0 * n) * math.pi + 4.0 * x
    disc = a * a - 16.0 * c.omega0R * x * x
    if disc < 0.0:
        raise NegativeDiscriminantError(
            f"no predicted maximum for n={n}, x={x} (discriminant {disc})"
        )
    return (a + math.sqrt(disc)) / (8.0 * c.omega0R)


def carrier_period(c):
    """Asymptotic DIT period 2 pi / omega0R."""
    return 2.0 * math.pi / c.omega0R


def first_max_trajectory(t0):
    """Position of the principal maximum at time t0 in the k0I -> 0 limit:
    x0 = 2 t0 - sqrt(3 pi t0).  No oblique asymptote exists, so tangent
    intercepts with x0 = 0 drift without limit."""
    thr = 0.75 * math.pi
    if t0 < thr:
        raise ValueError(f"t0 must be >= 3*pi/4 = {thr:.6f}, got {t0}")
    return 2.0 * t0 - math.sqrt(3.0 * math.pi * t0)


def _golden_refine(f, a, b, tol):
    """Golden-section maximizer on [a, b]."""
    c1 = b - _GOLDEN * (b - a)
    c2 = a + _GOLDEN * (b - a)
    f1, f2 = f(c1), f(c2)
    while (b - a) > tol:
        if f1 < f2:
            a, c1, f1 = c1, c2, f2
            c2 = a + _GOLDEN * (b - a)
            f2 = f(c2)
        else:
            b, c2, f2 = c2, c1, f1
            c1 = b - _GOLDEN * (b - a)
            f1 = f(c1)
    return 0.5 * (a + b)


def _density_grid(c, x, t):
    psi, _ = sm._eval_trace(c.k0I, x, t)
    return np.abs(psi) ** 2


def locate_extrema(c, x, t_window, kind="maxima", dt_sample=None, normalized=None):
    """Strict local extrema of the exact density in a time window.

    Each discrete extremum is refined by golden-section search to a time
    tolerance of 1e-6 times the carrier period.  Returns a list of
    (t, density) pairs; an empty list is a valid result.
    """
    if kind not in ("maxima", "minima"):
        raise ValueError(f"kind must be 'maxima' or 'minima', got {kind!r}")
    lo, hi = float(t_window[0]), float(t_window[1])
    if not (0.0 < lo < hi):
        raise ValueError(f"window must satisfy 0 < lo < hi, got {t_window}")
    period = carrier_period(c)
    if dt_sample is None:
        dt_sample = period / 50.0
    if dt_sample <= 0.0:
        raise ValueError("dt_sample must be > 0")
    if normalized is None:
        normalized = c.k0I < 0.0
    norm = sm.norm_constant(c) if normalized else 1.0

    t = np.arange(lo, hi + 0.5 * dt_sample, dt_sample)
    if t.size < 3:
        return []
    d = _density_grid(c, x, t)
    sign = 1.0 if kind == "maxima" else -1.0
    g = sign * d
    # strict interior extrema of the sampled trace
    idx = np.nonzero((g[1:-1] > g[:-2]) & (g[1:-1] > g[2:]))[0] + 1

    def f(tt):
        return sign * float(_density_grid(c, x, np.array([tt]))[0])

    out = []
    tol = 1e-6 * period
    for i in idx:
        t_ref = _golden_refine(f, t[i - 1], t[i + 1], tol)
        out.append((t_ref, float(_density_grid(c, x, np.array([t_ref]))[0]) / norm))
    return out


def maxima_records(c, x, n_max, dt_sample=None, t_window=None):
    """Measured vs predicted maxima times and intervals for n = 0..n_max.

    A custom t_window restricts the search; a window with no maxima
    yields an empty list.
    """
    t_pred = [predict_Tn(c, x, n) for n in range(n_max + 2)]
    period = carrier_period(c)
    t_c = pole_onset_time(c, x)
    window = t_window or (max(t_c, 1e-9), t_pred[n_max + 1] + period)
    maxima = locate_extrema(c, x, window, "maxima", dt_sample=dt_sample)
    records = []
    for n in range(min(n_max + 1, len(maxima) - 1)):
        records.append(
            MaximaRecord(
                n,
                t_pred[n],
                maxima[n][0],
                t_pred[n + 1] - t_pred[n],
                maxima[n + 1][0] - maxima[n][0],
            )
        )
    return records


def default_search_window(c, x):
    """Main-front-plus-DIT-train window used by visibility and the CLI."""
    t_c = pole_onset_time(c, x)
    lo = max(0.5 * t_c, 1e-6)
    return (lo, t_c + 40.0 * carrier_period(c))


def visibility(c, x, dt_sample=None):
    """Visibility Delta: second maximum minus the preceding minimum of the
    normalized density trace; 0 when fewer than two maxima exist."""
    if c.k0I >= 0.0:
        raise sm.NormalizationDivergenceError(
            "visibility requires a decaying source (k0I < 0)"
        )
    window = default_search_window(c, x)
    maxima = locate_extrema(c, x, window, "maxima", dt_sample=dt_sample)
    if len(maxima) < 2:
        return VisibilityPoint(c.k0I, x, 0.0)
    minima = locate_extrema(c, x, window, "minima", dt_sample=dt_sample)
    t1, _ = maxima[0]
    t2, d2 = maxima[1]
    between = [m for m in minima if t1 < m[0] < t2]
    if not between:
        return VisibilityPoint(c.k0I, x, 0.0)
    return VisibilityPoint(c.k0I, x, max(d2 - between[-1][1], 0.0))


def visibility_scan(k0I_grid, x_grid, threads=1, dt_sample=None):
    """Delta surface over a (k0I, x) grid and its argmax.

    Ties break toward smaller |k0I|, then smaller x.  Per-point failures
    are logged and excluded; the scan itself never aborts.
    """
    k0I_grid = list(k0I_grid)
    x_grid = list(x_grid)
    if not k0I_grid or not x_grid:
        raise ValueError("scan grids must be nonempty")
    if any(k >= 0.0 for k in k0I_grid):
        raise ValueError("k0I grid values must be strictly negative")

    points = [(k, x) for k in k0I_grid for x in x_grid]

    def one(pt):
        k, x = pt
        try:
            return visibility(sm.make_carrier(k), x, dt_sample=dt_sample)
        except Exception as exc:  # noqa: BLE001 - per-point aggregation
            log.warning("visibility failed at k0I=%g, x=%g: %s", k, x, exc)
            return None

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one, points))
    else:
        results = [one(pt) for pt in points]

    surface = [r for r in results if r is not None]
    if not surface:
        raise RuntimeError("every scan point failed")
    best = max(surface, key=lambda v: (v.delta, -abs(v.k0I), -v.x))
    return best, surface


def observability_bound(c, n_oscillations):
    """Largest x with T_1 - T_0 < N*tau0, by bisection on the exact
    interval expression (monotonically increasing in x)."""
    if c.k0I >= 0.0:
        raise ValueError("observability bound requires k0I < 0")
    if n_oscillations < 1:
        raise ObservabilityNoSolutionError(
            f"N must be >= 1, got {n_oscillations}"
        )
    budget = n_oscillations * c.tau0

    def t10(x):
        return predict_Tn(c, x, 1) - predict_Tn(c, x, 0)

    if t10(0.0) >= budget:
        raise ObservabilityNoSolutionError(
            f"T_1 - T_0 = {t10(0.0):.6g} at x=0 already exceeds "
            f"N*tau0 = {budget:.6g}"
        )
    hi = 1.0
    while t10(hi) < budget:
        hi *= 2.0
        if hi > 1e15:
            raise RuntimeError("bisection bracket blew up")
    lo = hi / 2.0
    while (hi - lo) > 1e-10 * hi:
        mid = 0.5 * (lo + hi)
        if t10(mid) < budget:
            lo = mid
        else:
            hi = mid
    return lo
