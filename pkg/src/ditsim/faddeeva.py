"""Faddeeva function w(z) = exp(-z^2) erfc(-iz) on the full complex plane.

Region-split evaluation: a Weideman rational approximation for moderate
|z| in the closed upper half-plane, the Laplace continued fraction for
large |z|, and the reflection identity w(z) = 2 exp(-z^2) - w(-z) for
Im z < 0.  Target accuracy is 1e-12 relative over |Re z|, |Im z| <= 50.

In the lower half-plane the reflection term 2 exp(-z^2) can exceed the
double range; this is reported as FaddeevaOverflowError, never returned
as Inf.
"""
import numpy as np

from ._backend import USE_NUMBA, njit

SQRT_PI = 1.7724538509055160273
INV_SQRT_PI = 0.5641895835477562869
TWO_INV_SQRT_PI = 1.1283791670955125739

# exp argument beyond which 2*exp(-z^2) is not representable
_OVERFLOW_EXP = 708.0

# Weideman region: |z|^2 below this, else continued fraction
_CF_CUT = 150.0
_CF_TERMS = 26


class FaddeevaOverflowError(OverflowError):
    """2*exp(-z^2) exceeds the floating range (deep lower half-plane)."""

    def __init__(self, z):
        self.z = complex(z)
        super().__init__(
            f"w(z) overflows double precision at z = {self.z!r} "
            "(Im z < 0 with Im(z)^2 - Re(z)^2 too large)"
        )


def _weideman_coeffs(n=64):
    # Weideman (1994), SIAM J. Numer. Anal. 31: rational expansion of w
    # on the upper half-plane; coefficients via FFT of the shifted Gaussian.
    m = 2 * n
    ind = np.arange(-m + 1, m)
    big_l = np.sqrt(n / np.sqrt(2.0))
    theta = (np.pi / m) * ind
    t = big_l * np.tan(0.5 * theta)
    f = np.zeros(2 * m)
    f[1:] = np.exp(-t * t) * (big_l * big_l + t * t)
    coefs = np.fft.fft(np.fft.fftshift(f)).real / (2 * m)
    return big_l, np.ascontiguousarray(coefs[n:0:-1])  # highest power first


_WEIDEMAN_L, _WEIDEMAN_A = _weideman_coeffs(64)


@njit(cache=True, nogil=True)
def _wofz_upper(zr, zi, big_l, a):
    """w(z) for Im z >= 0."""
    z = complex(zr, zi)
    if zr * zr + zi * zi >= _CF_CUT:
        # Laplace continued fraction, evaluated backward
        r = 0.0 + 0.0j
        for n in range(_CF_TERMS, 0, -1):
            r = (0.5 * n) / (z - r)
        return 1j * INV_SQRT_PI / (z - r)
    iz = 1j * z
    zd = big_l - iz
    arg = (big_l + iz) / zd
    p = 0.0 + 0.0j
    for k in range(a.shape[0]):
        p = p * arg + a[k]
    return 2.0 * p / (zd * zd) + INV_SQRT_PI / zd


@njit(cache=True, nogil=True)
def _wofz_scalar(zr, zi, big_l, a):
    """w(z) anywhere; returns (value, ok).  ok=False flags overflow."""
    if zi >= 0.0:
        return _wofz_upper(zr, zi, big_l, a), True
    # reflection: w(z) = 2 exp(-z^2) - w(-z)
    if zi * zi - zr * zr > _OVERFLOW_EXP:
        return complex(np.nan, np.nan), False
    z = complex(zr, zi)
    return 2.0 * np.exp(-z * z) - _wofz_upper(-zr, -zi, big_l, a), True


@njit(cache=True, nogil=True)
def _wofz_kernel(zr, zi, out, ok):
    for i in range(zr.shape[0]):
        out[i], ok[i] = _wofz_scalar(zr[i], zi[i], _WEIDEMAN_L, _WEIDEMAN_A)


def _wofz_array_numpy(z):
    """Vectorized fallback; same regions as the numba kernel."""
    z = np.asarray(z, dtype=np.complex128)
    ok = np.ones(z.shape, dtype=np.bool_)
    lower = z.imag < 0.0
    bad = lower & (z.imag**2 - z.real**2 > _OVERFLOW_EXP)
    ok[bad] = False
    zu = np.where(lower, -z, z)  # reduce to upper half-plane

    out = np.empty(z.shape, dtype=np.complex128)
    cf = (zu.real**2 + zu.imag**2) >= _CF_CUT
    if np.any(cf):
        zc = zu[cf]
        r = np.zeros_like(zc)
        for n in range(_CF_TERMS, 0, -1):
            r = (0.5 * n) / (zc - r)
        out[cf] = 1j * INV_SQRT_PI / (zc - r)
    wd = ~cf
    if np.any(wd):
        iz = 1j * zu[wd]
        zd = _WEIDEMAN_L - iz
        arg = (_WEIDEMAN_L + iz) / zd
        p = np.zeros_like(arg)
        for ak in _WEIDEMAN_A:
            p = p * arg + ak
        out[wd] = 2.0 * p / (zd * zd) + INV_SQRT_PI / zd

    if np.any(lower):
        safe = lower & ok
        out[safe] = 2.0 * np.exp(-z[safe] ** 2) - out[safe]
        out[bad] = np.nan + 1j * np.nan
    return out, ok


def _eval(z):
    z = np.asarray(z, dtype=np.complex128)
    if not np.all(np.isfinite(z)):
        raise ValueError("wofz requires finite arguments")
    flat = np.ascontiguousarray(z.reshape(-1))
    if USE_NUMBA:
        out = np.empty(flat.shape, dtype=np.complex128)
        ok = np.empty(flat.shape, dtype=np.bool_)
        _wofz_kernel(flat.real.copy(), flat.imag.copy(), out, ok)
    else:
        out, ok = _wofz_array_numpy(flat)
    if not np.all(ok):
        raise FaddeevaOverflowError(flat[np.argmin(ok)])
    return out.reshape(z.shape)


def wofz(z):
    """Faddeeva function w(z); scalar in, scalar out (arrays pass through).

    Raises FaddeevaOverflowError when 2*exp(-z^2) exceeds the double
    range in the lower half-plane.
    """
    if np.isscalar(z) or isinstance(z, complex):
        return complex(_eval(np.array([z]))[0])
    return _eval(z)


def wofz_deriv(z):
    """dw/dz = -2 z w(z) + 2i/sqrt(pi)."""
    w = wofz(z)
    if isinstance(w, complex):
        return -2.0 * complex(z) * w + 2j * INV_SQRT_PI
    return -2.0 * np.asarray(z, dtype=np.complex128) * w + 2j * INV_SQRT_PI
