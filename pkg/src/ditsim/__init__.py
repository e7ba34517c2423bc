"""Diffraction-in-time oscillations from an exponentially decaying point source.

Exact Faddeeva-function wave, its saddle/pole/interference decomposition,
maxima-time and visibility analysis, and a delta-barrier (Winter) model
cross-check.  Hot kernels are numba-compiled unless DITSIM_NO_NUMBA is set.
"""
from ._backend import backend_name
from .decomposition import approx_density, interference_term, pole_onset_time, pole_term, saddle_term
from .dit_analysis import (
    MaximaRecord,
    VisibilityPoint,
    carrier_period,
    first_max_trajectory,
    locate_extrema,
    maxima_records,
    observability_bound,
    predict_Tn,
    visibility,
    visibility_scan,
)
from .faddeeva import FaddeevaOverflowError, wofz, wofz_deriv
from .source_model import (
    Carrier,
    NormalizationDivergenceError,
    WaveSample,
    density_trace,
    make_carrier,
    make_point,
    norm_constant,
    psi_exact,
    psi_x_exact,
    sample,
)
from .winter_model import WinterConfig, fit_source_model, run as run_winter

__version__ = "0.1.0"

__all__ = [
    "Carrier",
    "FaddeevaOverflowError",
    "MaximaRecord",
    "NormalizationDivergenceError",
    "VisibilityPoint",
    "WaveSample",
    "WinterConfig",
    "approx_density",
    "backend_name",
    "carrier_period",
    "density_trace",
    "first_max_trajectory",
    "fit_source_model",
    "interference_term",
    "locate_extrema",
    "make_carrier",
    "make_point",
    "maxima_records",
    "norm_constant",
    "observability_bound",
    "pole_onset_time",
    "pole_term",
    "predict_Tn",
    "psi_exact",
    "psi_x_exact",
    "run_winter",
    "saddle_term",
    "sample",
    "visibility",
    "visibility_scan",
    "wofz",
    "wofz_deriv",
]
