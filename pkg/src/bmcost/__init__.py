"""Effective multipliers for log-Hölder weights and small-time control costs."""

from .sampled import FrequencyGrid, Grid, SampledFunction, fourier, inverse_fourier
from .transforms import (Envelope, GrowthClass, TailTerm, TransformInput, conj_poisson,
                         conj_poisson_kober, ct_constant, hilbert0, hilbert_kober, poisson)
from .weights import LogHolderWeight, epsilon_weight, particular_weight, smooth, smoothing_time
from .multiplier import (MultiplierRequest, MultiplierResult, build_multiplier,
                         build_multiplier_particular, kober_prefactor)
from .moment import BiorthogonalFamily, ModeLadder, biorth_matrix, build_family, eval_gl, eval_Pl
from .control import (InitialData, b_coefficient, cost_sweep, empirical_cost,
                      hilbert_form_check, moment_residuals, synthesize_control)

__version__ = "0.1.0"
