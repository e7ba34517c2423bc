"""Saddle/pole/interference decomposition of the emitted density.

The exact density splits into a smooth saddle ("big bang") contribution,
an exponentially decaying carrier (pole) contribution switched on at
t_c = x/[2(1+k0I)], and the cross term that carries every oscillation:

    |psi|^2 ~ |psi_s|^2 + Theta * (|psi_0|^2 + 2 Re[psi_s psi_0*]).

The cross term has an explicit trigonometric form (phase phi, envelope
beta); it is evaluated both that way and as 2 Re[psi_s psi_0*], and the
two routes are cross-checked in the tests.
"""
import math
from dataclasses import dataclass

import numpy as np


class SaddleSingularityWarning(UserWarning):
    """Evaluation point too close to t^2 = tau^2."""


@dataclass(frozen=True)
class InterferenceFactors:
    phi: float   # (omega0R + ks^2) t - x - 3 pi/4
    beta: float  # exp(omega0I t - k0I x)


@dataclass(frozen=True)
class Decomposition:
    saddle: complex
    pole: complex
    pole_active: bool
    interference: float
    approx_density: float


def pole_onset_time(c, x):
    """t_c = x / [2 (1 + k0I)], where Im(u0p) changes sign."""
    return x / (2.0 * (1.0 + c.k0I))


def saddle_term(c, p):
    """psi_s = (2t/pi)^(1/2) tau e^{i ks^2 t} / [(i-1) k0 (t^2 - tau^2)]."""
    t = p.t
    denom = t * t - p.tau * p.tau
    if abs(denom) < 1e-9 * t * t:
        import warnings

        warnings.warn(
            f"saddle term nearly singular at x={p.x}, t={t}",
            SaddleSingularityWarning,
        )
    num = math.sqrt(2.0 * t / math.pi) * p.tau * np.exp(1j * p.ks**2 * t)
    return complex(num / ((1j - 1.0) * c.k0 * denom))


def pole_term(c, p):
    """(psi_0, active): carrier wave e^{-i omega0 t + i k0 x}, on for Im(u0p) >= 0."""
    psi0 = np.exp(-1j * c.omega0 * p.t + 1j * c.k0 * p.x)
    return complex(psi0), bool(p.u0p.imag >= 0.0)


def interference_factors(c, p):
    phi = (c.omega0R + p.ks**2) * p.t - p.x - 0.75 * math.pi
    beta = math.exp(c.omega0I * p.t - c.k0I * p.x)
    return InterferenceFactors(phi, beta)


def interference_term(c, p):
    """2 Re[psi_s psi_0*] in its explicit trigonometric form (gated by the
    pole onset: 0 before t_c)."""
    _, active = pole_term(c, p)
    if not active:
        return 0.0
    return _interference_explicit(c, p)


def _interference_explicit(c, p):
    t, x = p.t, p.x
    fac = interference_factors(c, p)
    aw2 = abs(c.omega0) ** 2
    denom = 16.0 * aw2 * t**4 + x**4 - 8.0 * t**2 * x**2 * c.omega0R
    pre = math.sqrt(t / math.pi) * 2.0 * fac.beta / denom
    return pre * (
        (8.0 * c.omega0R * x * t**2 - 2.0 * x**3) * math.cos(fac.phi)
        + 8.0 * c.omega0I * x * t**2 * math.sin(fac.phi)
    )


def _interference_product(c, p):
    """Reference route: 2 Re[psi_s psi_0*] from the terms themselves."""
    psi0, active = pole_term(c, p)
    if not active:
        return 0.0
    return 2.0 * (saddle_term(c, p) * psi0.conjugate()).real


def approx_density(c, p):
    """Assemble the full decomposition at a point."""
    s = saddle_term(c, p)
    psi0, active = pole_term(c, p)
    inter = _interference_explicit(c, p) if active else 0.0
    dens = abs(s) ** 2 + (abs(psi0) ** 2 + inter) * (1.0 if active else 0.0)
    return Decomposition(s, psi0, active, inter, dens)
