"""Cahn-Hilliard image inpainting with uncertainty quantification.

Deterministic binary and grayscale inpainting by a convexity-splitting
cosine-spectral scheme, plus three treatments of noisy initial data: an
intrusive polynomial-chaos mode expansion, a first-order perturbation pair,
and a Monte Carlo reference.
"""

from .field import (ScalarField, SpectralPlan, implicit_solve, integrate,
                    laplacian)
from .galerkin import (ModeStack, galerkin_step, init_modes, nonlinear_term,
                       run_galerkin, two_mode_step)
from .gpc import (HermiteGaussian, LegendreUniform, MomentTensors,
                  moment_tensors, norm_factor, poly_eval, project, quadrature)
from .inpaint import (InpaintProblem, RunDiagnostics, SolverConfig, ch_step,
                      energies, run_inpaint, w_prime)
from .multiphase import (PhaseStack, multiphase_step, phase_decompose,
                         reconstruct, run_multiphase)
from .perturbation import (PerturbationState, first_order_variance,
                           ordering_ratio, perturbation_mean,
                           perturbation_step, run_perturbation)
from .uq import MonteCarloResult, NoiseSpec, mean_field, monte_carlo, variance_field

__version__ = "0.1.0"

__all__ = [
    "ScalarField", "SpectralPlan", "laplacian", "implicit_solve", "integrate",
    "InpaintProblem", "SolverConfig", "RunDiagnostics", "w_prime", "ch_step",
    "energies", "run_inpaint",
    "PhaseStack", "phase_decompose", "reconstruct", "multiphase_step",
    "run_multiphase",
    "HermiteGaussian", "LegendreUniform", "MomentTensors", "poly_eval",
    "norm_factor", "quadrature", "moment_tensors", "project",
    "ModeStack", "init_modes", "nonlinear_term", "galerkin_step",
    "run_galerkin", "two_mode_step",
    "PerturbationState", "perturbation_step", "perturbation_mean",
    "first_order_variance", "ordering_ratio", "run_perturbation",
    "NoiseSpec", "MonteCarloResult", "mean_field", "variance_field",
    "monte_carlo",
]
