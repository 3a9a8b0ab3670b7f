"""Descriptive-norm dynamics on a 1-D opinion space.

A population density ``P(x, t)`` moves by diffusion, by climbing a nonlocal
perceived gradient built from a difference-of-Gaussians kernel, and
optionally down a quadratic potential.  Around the simulator sit a linear
stability analyser, Gaussian-mixture targets and agent beliefs, Wasserstein
convergence metrics and kernel adaptation rules.
"""

from .adaptation import (CausalDrive, CausalFact, TargetDrivenConfig, adaptation_factor,
                         causal_update, net_causal_effect, read_facts, target_driven_update,
                         time_amplification)
from .core import (Grid, PeakSet, PopulationField, center_of_mass, count_clusters,
                   detect_peaks, find_peaks_1d, total_mass)
from .dynamics import (NO_POTENTIAL, Callback, PhysicsParams, PotentialField, RunState,
                       StepControl, compute_velocity, potential_gradient, run, step)
from .errors import (CallbackError, ConfigurationError, DegenerateKernelError,
                     DegenerateWeightsError, DegenerateWindowError, DomainError, NormPDEError,
                     NumericalBlowupError, ScenarioParseError, UnsupportedRegimeError,
                     ValidationError)
from .gmm import (GaussianMixture, cdf, density, quantile, read_mixture, sample,
                  write_mixture)
from .kernel import (KernelField, KernelParams, eval_kernel, first_moment, gradient_strength,
                     nonlocal_gradient)
from .metrics import (MetricsRecord, field_vs_target_distance, wasserstein_1d,
                      weighted_avg_distance)
from .sinp import (SinpAgent, SinpPopulation, sinp_initialize, sinp_update,
                   weighted_sample)
from .stability import (DispersionPoint, dispersion_scan, growth_rate, instability_condition,
                        q_closed_form, q_function)

__version__ = "0.1.0"

__all__ = ["CausalDrive", "CausalFact", "TargetDrivenConfig", "adaptation_factor",
           "causal_update", "net_causal_effect", "read_facts", "target_driven_update",
           "time_amplification", "Grid", "PeakSet", "PopulationField", "center_of_mass",
           "count_clusters", "detect_peaks", "find_peaks_1d", "total_mass", "NO_POTENTIAL",
           "Callback", "PhysicsParams", "PotentialField", "RunState", "StepControl",
           "compute_velocity", "potential_gradient", "run", "step", "CallbackError",
           "ConfigurationError", "DegenerateKernelError", "DegenerateWeightsError",
           "DegenerateWindowError", "DomainError", "NormPDEError", "NumericalBlowupError",
           "ScenarioParseError", "UnsupportedRegimeError", "ValidationError",
           "GaussianMixture", "cdf", "density", "quantile", "read_mixture", "sample",
           "write_mixture", "KernelField", "KernelParams", "eval_kernel", "first_moment",
           "gradient_strength", "nonlocal_gradient", "MetricsRecord",
           "field_vs_target_distance", "wasserstein_1d", "weighted_avg_distance", "SinpAgent",
           "SinpPopulation", "sinp_initialize", "sinp_update", "weighted_sample",
           "DispersionPoint", "dispersion_scan", "growth_rate", "instability_condition",
           "q_closed_form", "q_function"]
