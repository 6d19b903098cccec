"""Stochastic oscillators driven by q-exponentially correlated noise.

A numerical laboratory around one linear damped oscillator with random
frequency modulation: deformed-exponential calculus and non-extensive
entropies, the gamma-compounded construction of heavy-tailed autocorrelations,
exact and covariance-factorized noise samplers, Monte Carlo estimation of the
ensemble-averaged Green's function with exact oracles, and deterministic
perturbative/self-consistent (DIA) closure solvers in the time and Laplace
domains.
"""

from .closures import (ClosureProblem, LaplaceSolution, invert_laplace, laplace_dia,
                       laplace_perturbative, large_time_solution, volterra_dia,
                       volterra_perturbative, white_noise_solution)
from .gamma_compound import (GammaParams, RateMoments, compound_autocorr_quadrature,
                             delta_limit_error, gamma_pdf, marginal_autocorr,
                             moments_from_params, params_from_moments, q_from_shape,
                             sample_rate)
from .kernels import (LimitPath, MonotonicityReport, NoiseKernel, eval_kernel,
                      iq_closed_form, iq_property_scan, iq_quadrature, limit_path_value,
                      white_noise_weight)
from .noise import (AutocorrEstimate, CompoundOU, EnsembleSpec, NoisePath, TimeGrid,
                    compound_ou_path, empirical_autocorr, ensemble_paths,
                    gaussian_qexp_path, ou_path, qexp_covariance_factor, realization_rng)
from .oscillator import (GreenFunction, OscillatorConfig, ensemble_mean_green,
                         exact_compound_markov_mean, exact_markov_mean,
                         simulate_realization)
from .qcalc import (DiscreteDistribution, QIndex, escort_probabilities,
                    maxent_distribution, q_exp, q_log, tsallis_entropy)

__version__ = "0.1.0"

__all__ = [
    "AutocorrEstimate", "ClosureProblem", "CompoundOU", "DiscreteDistribution",
    "EnsembleSpec", "GammaParams", "GreenFunction", "LaplaceSolution", "LimitPath",
    "MonotonicityReport", "NoiseKernel", "NoisePath", "OscillatorConfig", "QIndex",
    "RateMoments", "TimeGrid", "compound_autocorr_quadrature", "compound_ou_path",
    "delta_limit_error", "empirical_autocorr", "ensemble_mean_green", "ensemble_paths",
    "escort_probabilities", "eval_kernel", "exact_compound_markov_mean",
    "exact_markov_mean", "gamma_pdf", "gaussian_qexp_path", "invert_laplace",
    "iq_closed_form", "iq_property_scan", "iq_quadrature", "laplace_dia",
    "laplace_perturbative", "large_time_solution", "limit_path_value",
    "marginal_autocorr", "maxent_distribution", "moments_from_params", "ou_path",
    "params_from_moments", "q_exp", "q_from_shape", "q_log", "qexp_covariance_factor",
    "realization_rng", "sample_rate", "simulate_realization", "tsallis_entropy",
    "volterra_dia", "volterra_perturbative", "white_noise_solution",
    "white_noise_weight",
]
