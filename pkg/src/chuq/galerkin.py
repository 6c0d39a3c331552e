"""Intrusive spectral solver for inpainting with a noisy initial image.

The solution is expanded as u(x, y, t, Z) = sum_j u_j(x, y, t) Phi_j(Z) and
the governing equation is projected onto each basis polynomial.  The cubic
and quadratic potential terms couple the coefficient fields through the
moment tensors; the fidelity term projects to lam*(f - u_0) in the mean
equation and -lam*u_j in every higher mode (the data f carries no noise).
Each mode advances with the same convexity splitting as the deterministic
solver, with the coupled potential treated explicitly from the time-n stack.

``two_mode_step`` is an independently coded reference for the unit-variance
Gaussian two-mode system, used to cross-check the general tensor path.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .field import ScalarField, SpectralPlan, dct2, idct2, implicit_symbol
from .gpc import HermiteGaussian, LegendreUniform, MomentTensors, moment_tensors
from .inpaint import InpaintProblem, RunDiagnostics, SolverConfig, energies

__all__ = [
    "ModeStack",
    "init_modes",
    "nonlinear_term",
    "galerkin_step",
    "run_galerkin",
    "two_mode_step",
]


@dataclass(frozen=True)
class ModeStack:
    """Coefficient fields u_0..u_N of a noise expansion on one grid."""

    values: np.ndarray  # (N+1, height, width)
    family: HermiteGaussian | LegendreUniform
    tensors: MomentTensors
    spacing: float = 1.0

    def __post_init__(self):
        arr = np.array(self.values, dtype=np.float64)
        if arr.ndim != 3:
            raise ValueError(f"mode values must be 3-D, got shape {arr.shape}")
        if arr.shape[0] != self.tensors.gamma.size:
            raise ValueError(
                f"{arr.shape[0]} modes do not match tensors of order {self.tensors.order}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("mode values must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)
        object.__setattr__(self, "spacing", float(self.spacing))

    @property
    def order(self) -> int:
        return self.values.shape[0] - 1

    @property
    def modes(self) -> tuple[ScalarField, ...]:
        return tuple(ScalarField(v, self.spacing) for v in self.values)

    def with_values(self, values: np.ndarray) -> "ModeStack":
        return ModeStack(values, self.family, self.tensors, self.spacing)


def init_modes(u0_field: ScalarField, family, order: int | None = None) -> ModeStack:
    """Stack for the additive-noise initial state u0 + Z: modes (u0, 1, 0, ..., 0)."""
    n = family.max_degree if order is None else order
    if n < 1:
        raise ValueError(f"expansion order must be at least 1, got {n}")
    tensors = moment_tensors(family, n)
    values = np.zeros((n + 1, u0_field.height, u0_field.width))
    values[0] = u0_field.values
    values[1] = 1.0
    return ModeStack(values, family, tensors, u0_field.spacing)


def nonlinear_term(stack: ModeStack, j: int) -> ScalarField:
    """Potential part of mode j's chemical potential (before the 1/eps factor):

        (4 sum_ipq u_i u_p u_q e_ipqj - 6 sum_ip u_i u_p e_ipj) / gamma_j + 2 u_j
    """
    if not 0 <= j <= stack.order:
        raise ValueError(f"mode index {j} out of range 0..{stack.order}")
    pot = kernels.mode_potential(stack.values, stack.tensors.e3,
                                 stack.tensors.e4, stack.tensors.gamma)
    return ScalarField(pot[j], stack.spacing)


def _fidelity_stack(values: np.ndarray, f: np.ndarray, lam: np.ndarray) -> np.ndarray:
    fid = np.empty_like(values)
    fid[0] = lam * (f - values[0])
    for j in range(1, values.shape[0]):
        fid[j] = -lam * values[j]
    return fid


def galerkin_step(stack: ModeStack, problem: InpaintProblem, config: SolverConfig,
                  plan: SpectralPlan) -> ModeStack:
    """Advance all modes one time step from the same time-n stack."""
    if stack.values.shape[1:] != (plan.height, plan.width):
        raise ValueError("galerkin_step: stack and plan grids must match")
    eps = problem.eps
    c1 = config.effective_c1(eps)
    c2 = config.effective_c2(problem.lambda0)
    sym = implicit_symbol(1.0 / config.dt, eps, c1, c2, plan)
    values = stack.values
    values_hat = dct2(values)
    pot = kernels.mode_potential(values, stack.tensors.e3, stack.tensors.e4,
                                 stack.tensors.gamma)
    fid = _fidelity_stack(values, problem.f.values, problem.lam)
    ev = plan.eigenvalues
    rhs = (values_hat / config.dt + (ev / eps) * dct2(pot) + dct2(fid)
           - c1 * ev * values_hat + c2 * values_hat)
    out = idct2(rhs / sym)
    if not np.all(np.isfinite(out)):
        raise ValueError("galerkin step produced non-finite values")
    return stack.with_values(out)


def run_galerkin(problem: InpaintProblem, family, config: SolverConfig,
                 order: int | None = None) -> tuple[ModeStack, RunDiagnostics]:
    """Drive the coupled mode system; residual is taken over all modes jointly.

    Diagnostics record the energies and mass of the mean field u_0.  The eps
    schedule is ignored here; the run uses the problem's single eps.
    """
    stack = init_modes(problem.f, family, order)
    plan = SpectralPlan.for_field(problem.f)
    dt = config.dt
    eps = problem.eps
    c1 = config.effective_c1(eps)
    c2 = config.effective_c2(problem.lambda0)
    sym = implicit_symbol(1.0 / dt, eps, c1, c2, plan)
    ev = plan.eigenvalues
    f = problem.f.values
    lam = problem.lam
    tensors = stack.tensors
    h2 = problem.f.spacing ** 2
    nvals = stack.values.size

    values = stack.values.copy()
    values_hat = dct2(values)
    diag = RunDiagnostics()
    res = np.inf
    for step in range(1, config.max_steps + 1):
        pot = kernels.mode_potential(values, tensors.e3, tensors.e4, tensors.gamma)
        fid = _fidelity_stack(values, f, lam)
        rhs = (values_hat / dt + (ev / eps) * dct2(pot) + dct2(fid)
               - c1 * ev * values_hat + c2 * values_hat)
        new_hat = rhs / sym
        new = idct2(new_hat)
        if not np.all(np.isfinite(new)):
            raise ValueError(f"galerkin run produced non-finite values at step {step}")
        res = float(np.linalg.norm((new - values).ravel()) / (dt * np.sqrt(nvals)))
        values, values_hat = new, new_hat
        mean = ScalarField(values[0], problem.f.spacing)
        e1, e2 = energies(mean, problem, plan)
        diag.append(step, step * dt, e1, e2, res, h2 * values[0].sum())
        if res <= config.tol:
            break

    diag.converged = res <= config.tol
    return stack.with_values(values), diag


def two_mode_step(u0: ScalarField, u1: ScalarField, problem: InpaintProblem,
                  config: SolverConfig,
                  plan: SpectralPlan) -> tuple[ScalarField, ScalarField]:
    """Reference step for the two-mode system under unit-variance Gaussian noise.

    The coupled potentials are written out with the explicit Gaussian moments
    E[Z^2] = 1 and E[Z^4] = 3 instead of going through the moment tensors:

        mean:   4(u0^3 + 3 u0 u1^2) - 6(u0^2 + u1^2) + 2 u0
        first:  4(u1^3 * 3 + 3 u1 u0^2) - 6(2 u0 u1) + 2 u1
    """
    a, b = u0.values, u1.values
    nl0 = 4.0 * (a ** 3 + 3.0 * a * b ** 2) - 6.0 * (a ** 2 + b ** 2) + 2.0 * a
    nl1 = 4.0 * (b ** 3 * 3.0 + 3.0 * b * a ** 2) - 6.0 * (2.0 * a * b) + 2.0 * b
    eps = problem.eps
    c1 = config.effective_c1(eps)
    c2 = config.effective_c2(problem.lambda0)
    sym = implicit_symbol(1.0 / config.dt, eps, c1, c2, plan)
    ev = plan.eigenvalues
    lam = problem.lam
    out = []
    for cur, nl, fid in ((a, nl0, lam * (problem.f.values - a)),
                         (b, nl1, -lam * b)):
        cur_hat = dct2(cur)
        rhs = (cur_hat / config.dt + (ev / eps) * dct2(nl) + dct2(fid)
               - c1 * ev * cur_hat + c2 * cur_hat)
        out.append(idct2(rhs / sym))
    return u0.with_values(out[0]), u1.with_values(out[1])
