"""Exact wave emitted by an exponentially decaying point source.

Boundary condition psi(0,t) = exp(-i*omega0*t)*Theta(t) with carrier
wavenumber k0 = 1 + i*k0I (unit length = inverse real carrier
wavenumber, mass 1/2, hbar = 1), dispersion omega0 = k0^2.  The closed
form is

    psi(x,t) = (1/2) e^{i ks^2 t} [ w(-u0p) + w(-u0m) ],
    u0{p,m}  = +-(1+i) sqrt(t/2) k0 (1 -+ tau/t),
    ks = x/(2t),  tau = x/(2 k0).

When an argument of w falls in the lower half-plane the reflection
identity is applied and the exponential factor is folded analytically
into e^{i ks^2 t}, so the bounded products

    e^{i ks^2 t} e^{-u0p^2} = e^{i(k0 x - omega0 t)}
    e^{i ks^2 t} e^{-u0m^2} = e^{-i(k0 x + omega0 t)}

are evaluated directly instead of their separately-overflowing factors.
"""
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import quad

from ._backend import USE_NUMBA, njit
from .faddeeva import (
    _CF_CUT,
    _CF_TERMS,
    _WEIDEMAN_A,
    _WEIDEMAN_L,
    _wofz_upper,
    FaddeevaOverflowError,
    INV_SQRT_PI,
)

_OVERFLOW_EXP = 708.0


class NormalizationDivergenceError(ValueError):
    """Emitted-norm integral diverges (k0I = 0: the source never stops)."""


@dataclass(frozen=True)
class Carrier:
    """Complex carrier pole and derived constants; k0R is fixed to 1."""

    k0I: float
    k0: complex
    omega0: complex
    omega0R: float
    omega0I: float
    tau0: float  # lifetime 1/(4|k0I|), inf at k0I = 0


@dataclass(frozen=True)
class SpacetimePoint:
    x: float
    t: float
    ks: float        # saddle wavenumber x/(2t)
    vs: float        # saddle velocity x/t
    tau: complex     # characteristic time x/(2 k0)
    u0p: complex
    u0m: complex


@dataclass(frozen=True)
class WaveSample:
    psi: complex
    psi_x: complex
    density: float
    flux: float


def make_carrier(k0I):
    """Carrier for imaginary wavenumber part k0I, -1 < k0I <= 0."""
    k0I = float(k0I)
    if not (-1.0 < k0I <= 0.0):
        raise ValueError(f"k0I must satisfy -1 < k0I <= 0, got {k0I}")
    k0 = complex(1.0, k0I)
    omega0 = k0 * k0
    tau0 = math.inf if k0I == 0.0 else 1.0 / (4.0 * abs(k0I))
    return Carrier(k0I, k0, omega0, omega0.real, omega0.imag, tau0)


def make_point(c, x, t):
    """Spacetime evaluation point with the carrier-derived kinematics."""
    x = float(x)
    t = float(t)
    if x < 0.0:
        raise ValueError(f"x must be >= 0, got {x}")
    if t <= 0.0:
        raise ValueError(f"t must be > 0, got {t}")
    ks = x / (2.0 * t)
    tau = x / (2.0 * c.k0)
    pref = (1.0 + 1.0j) * math.sqrt(t / 2.0) * c.k0
    u0p = pref * (1.0 - tau / t)
    u0m = -pref * (1.0 + tau / t)
    return SpacetimePoint(x, t, ks, 2.0 * ks, tau, u0p, u0m)


@njit(cache=True, nogil=True)
def _psi_pair(k0I, x, t):
    """(psi, dpsi/dx, ok) at one point; ok=False on overflow."""
    k0 = complex(1.0, k0I)
    omega0 = k0 * k0
    ks = x / (2.0 * t)
    tau = x / (2.0 * k0)
    pref = (1.0 + 1.0j) * np.sqrt(t / 2.0) * k0
    a = -pref * (1.0 - tau / t)   # -u0p
    b = pref * (1.0 + tau / t)    # -u0m
    phis = ks * ks * t
    eiphis = complex(np.cos(phis), np.sin(phis))

    psi = 0.0j
    dsum = 0.0j  # sum over roots of e^{i phis} w'(root)
    for idx in range(2):
        r = a if idx == 0 else b
        if r.imag >= 0.0:
            wr = _wofz_upper(r.real, r.imag, _WEIDEMAN_L, _WEIDEMAN_A)
            psi += 0.5 * eiphis * wr
            dsum += eiphis * (-2.0 * r * wr + 2j * INV_SQRT_PI)
        else:
            # folded pole exponential: e^{i phis} e^{-r^2}
            if idx == 0:
                ex = 1j * (k0 * x - omega0 * t)
            else:
                ex = -1j * (k0 * x + omega0 * t)
            if ex.real > _OVERFLOW_EXP:
                return 0.0j, 0.0j, False
            p = np.exp(ex)
            wr = _wofz_upper(-r.real, -r.imag, _WEIDEMAN_L, _WEIDEMAN_A)
            psi += -0.5 * eiphis * wr + p
            dsum += -2.0 * r * (-eiphis * wr + 2.0 * p) + eiphis * 2j * INV_SQRT_PI
    psi_x = 1j * ks * psi + (1.0 + 1.0j) / (4.0 * np.sqrt(2.0 * t)) * dsum
    return psi, psi_x, True


@njit(cache=True, nogil=True)
def _trace_kernel(k0I, x, t_arr, psi_out, psix_out, ok_out):
    for i in range(t_arr.shape[0]):
        psi_out[i], psix_out[i], ok_out[i] = _psi_pair(k0I, x, t_arr[i])


def _psi_pair_arrays(k0I, x, t_arr):
    """Vectorized (psi, psi_x) over a time grid; numpy fallback path."""
    t = np.asarray(t_arr, dtype=np.float64)
    k0 = complex(1.0, k0I)
    omega0 = k0 * k0
    ks = x / (2.0 * t)
    tau = x / (2.0 * k0)
    pref = (1.0 + 1.0j) * np.sqrt(t / 2.0) * k0
    roots = (-pref * (1.0 - tau / t), pref * (1.0 + tau / t))
    fold_ex = (1j * (k0 * x - omega0 * t), -1j * (k0 * x + omega0 * t))
    eiphis = np.exp(1j * ks * ks * t)

    psi = np.zeros(t.shape, dtype=np.complex128)
    dsum = np.zeros(t.shape, dtype=np.complex128)
    ok = np.ones(t.shape, dtype=np.bool_)
    from .faddeeva import _wofz_array_numpy

    for r, ex in zip(roots, fold_ex):
        upper = r.imag >= 0.0
        wr = np.empty(t.shape, dtype=np.complex128)
        if np.any(upper):
            wr[upper] = _wofz_array_numpy(r[upper])[0]
        low = ~upper
        if np.any(low):
            wr[low] = _wofz_array_numpy(-r[low])[0]
        bad = low & (np.real(ex) > _OVERFLOW_EXP)
        ok &= ~bad
        p = np.where(low & ~bad, np.exp(np.where(bad, 0, ex)), 0.0)
        sgn = np.where(upper, 1.0, -1.0)
        psi += 0.5 * eiphis * sgn * wr + p
        dsum += -2.0 * r * (sgn * eiphis * wr + 2.0 * p) + eiphis * 2j * INV_SQRT_PI
    psi_x = 1j * ks * psi + (1.0 + 1.0j) / (4.0 * np.sqrt(2.0 * t)) * dsum
    return psi, psi_x, ok


def _eval_trace(k0I, x, t_arr):
    t_arr = np.ascontiguousarray(t_arr, dtype=np.float64)
    if USE_NUMBA:
        psi = np.empty(t_arr.shape, dtype=np.complex128)
        psix = np.empty(t_arr.shape, dtype=np.complex128)
        ok = np.empty(t_arr.shape, dtype=np.bool_)
        _trace_kernel(float(k0I), float(x), t_arr, psi, psix, ok)
    else:
        psi, psix, ok = _psi_pair_arrays(float(k0I), float(x), t_arr)
    if not np.all(ok):
        i = int(np.argmin(ok))
        raise FaddeevaOverflowError(complex(x, t_arr[i]))
    return psi, psix


def psi_exact(c, p):
    """Exact psi(x,t) for carrier `c` at point `p`."""
    psi, _ = _eval_trace(c.k0I, p.x, np.array([p.t]))
    return complex(psi[0])


def psi_x_exact(c, p):
    """Closed-form spatial derivative of the exact psi."""
    _, psix = _eval_trace(c.k0I, p.x, np.array([p.t]))
    return complex(psix[0])


def sample(c, p):
    """psi, psi_x, density and flux at a point."""
    psi, psix = _eval_trace(c.k0I, p.x, np.array([p.t]))
    ps, px = complex(psi[0]), complex(psix[0])
    return WaveSample(ps, px, abs(ps) ** 2, 2.0 * (ps.conjugate() * px).imag)


@lru_cache(maxsize=256)
def _norm_constant_cached(k0I):
    def j0(t):
        psi, psix = _eval_trace(k0I, 0.0, np.array([t]))
        return 2.0 * (np.conj(psi[0]) * psix[0]).imag

    tau0 = 1.0 / (4.0 * abs(k0I))
    t_max = max(50.0 * tau0, 100.0)
    # substitute t = u^2 to tame the 1/sqrt(t) behavior of J(0,t) near 0
    pts = sorted({0.0, math.sqrt(tau0), math.sqrt(10.0 * tau0), math.sqrt(t_max)})
    total = 0.0
    for lo, hi in zip(pts[:-1], pts[1:]):
        val, _ = quad(
            lambda u: 2.0 * u * j0(u * u), lo, hi, limit=4000, epsabs=0.0, epsrel=1e-12
        )
        total += val
    if not (total > 0.0 and math.isfinite(total)):
        raise ArithmeticError(f"norm integral failed for k0I={k0I}: {total}")
    return total


def norm_constant(c):
    """Emitted norm  integral of J(0,t) dt; requires a decaying source."""
    if c.k0I >= 0.0:
        raise NormalizationDivergenceError(
            "normalization diverges for k0I = 0 (non-decaying source); "
            "use unnormalized densities"
        )
    return _norm_constant_cached(c.k0I)


def density_trace(c, x, t_grid, normalized=False):
    """Columns (t, density, flux) over a strictly increasing time grid."""
    t = np.asarray(t_grid, dtype=np.float64)
    if t.size == 0:
        return np.empty((0, 3))
    if np.any(t <= 0.0) or np.any(np.diff(t) <= 0.0):
        raise ValueError("t_grid must be strictly increasing and positive")
    psi, psix = _eval_trace(c.k0I, x, t)
    dens = np.abs(psi) ** 2
    flux = 2.0 * np.imag(np.conj(psi) * psix)
    if normalized:
        n = norm_constant(c)
        dens = dens / n
        flux = flux / n
    return np.column_stack([t, dens, flux])
