"""Elliptical tempered stable and TID distributions.

Characteristic functions, spectral-measure constructions, sampling by
subordination, Fourier density inversion, and an evolution-equation solver
with three series solutions cross-checked against the closed form.
"""

__version__ = "0.1.0"

from ._backend import BACKEND
from .charfn import (EtsParams, SubordinatorParams, TidParams, ets_cf, ets_exponent, psi_alpha,
                     psi_alpha0, subordinator_cf, subordinator_laplace, symmetric_tid_cf, tid_cf,
                     tid_exponent)
from .density import DensityGrid, GridSpec, invert_cf, invert_values, ks_distance
from .dispersion import cholesky, decompose, transform_law
from .errors import EtsError, NumericalError, ParameterError
from .fpde import FourierField, GeneratorSymbol, closed_form, density_at_time, grid_for_symbol, solve
from .measures import SpectralMeasure, TemperingFamily, build_r_from_q, symmetrize
from .sampling import RngState, SampleBatch, sample_ets, sample_tempered_subordinator
from .series import SeriesState, partial_sum, series_density
from .specfun import gamma, kummer_1f1, upper_incomplete_gamma

__all__ = [
    "BACKEND", "DensityGrid", "EtsError", "EtsParams", "FourierField", "GeneratorSymbol",
    "GridSpec", "NumericalError", "ParameterError", "RngState", "SampleBatch", "SeriesState",
    "SpectralMeasure", "SubordinatorParams", "TemperingFamily", "TidParams", "build_r_from_q",
    "cholesky", "closed_form", "decompose", "density_at_time", "ets_cf", "ets_exponent", "gamma",
    "grid_for_symbol", "invert_cf", "invert_values", "ks_distance", "kummer_1f1", "partial_sum",
    "psi_alpha", "psi_alpha0", "sample_ets", "sample_tempered_subordinator", "series_density",
    "solve", "subordinator_cf", "subordinator_laplace", "symmetric_tid_cf", "symmetrize",
    "tid_cf", "tid_exponent", "transform_law", "upper_incomplete_gamma",
]
