"""Compactly supported smooth functions with monotone, sub-exponentially decaying transforms.

A decay target ``exp(-C k**delta)`` is realised by the bump
``phi_{A,B}(x) = exp(-B(1-x)**-A - B(1+x)**-A)``; from it the pipeline builds a
nonnegative function ``F`` supported in ``[-1, 1]`` whose transform is
nonincreasing on ``k >= 0`` and decays at the target rate.
"""

from .asymptotics import AsymptoticModel, asymptotic_value, fit_constant, phase_zeros, subset_tildeZ
from .bump import BumpFunction, conv_phi, eval_phi, eval_phi_complex
from .construct import (GridConfig, PipelineArtifacts, SampledFunction, SpectralTable,
                        big_F_hat, capital_I, f_hat, psi_hat, run_pipeline)
from .errors import (CrossValidationFailure, DomainError, InsufficientSamples, SubexpBumpError,
                     TailNotNegligible, ToleranceNotMet, WindowTooSmall)
from .fourier import (KGrid, Method, TransformResult, build_k_grid, ft_contour, ft_dispatch,
                      ft_real_axis, inverse_ft, transform_many)
from .params import BumpParams, DecaySpec, resolve_params
from .verify import VerificationReport, full_report

__version__ = "0.1.0"
