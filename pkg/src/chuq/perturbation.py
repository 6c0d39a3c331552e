"""First-order expansion of the solution in a small noise amplitude.

For an initial state u0 + Z with Z uniform on (0, delta), delta << 1, the
solution is expanded as u = u_0 + Z u_1 + ...; collecting powers of Z gives
a closed pair of equations: u_0 follows the deterministic flow unchanged,
and u_1 obeys the linearization around it,

    d/dt u_1 = -Lap(eps*Lap u_1 - W''(u_0) u_1 / eps) - lam u_1,

with initial data u_1 = 1.  The u_0 update shares the deterministic solver's
code path bit for bit, so the leading order is exactly the plain run.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from . import kernels
from .field import ScalarField, SpectralPlan, dct2, idct2, implicit_symbol
from .inpaint import InpaintProblem, RunDiagnostics, SolverConfig, energies, _step_transform

__all__ = [
    "PerturbationState",
    "initial_state",
    "perturbation_step",
    "perturbation_mean",
    "first_order_variance",
    "ordering_ratio",
    "run_perturbation",
]


@dataclass(frozen=True)
class PerturbationState:
    """Leading and first-order fields plus the noise amplitude delta."""

    u0: ScalarField
    u1: ScalarField
    delta: float

    def __post_init__(self):
        if (self.u0.width, self.u0.height) != (self.u1.width, self.u1.height):
            raise ValueError("u0 and u1 must share a grid")
        if self.delta < 0:
            raise ValueError(f"delta must be nonnegative, got {self.delta}")
        if self.delta > 0.3:
            warnings.warn(
                f"delta={self.delta} is large for a first-order expansion",
                stacklevel=3)


def initial_state(problem: InpaintProblem, delta: float) -> PerturbationState:
    if not delta > 0:
        raise ValueError(f"delta must be positive for a run, got {delta}")
    u1 = ScalarField.constant(problem.f.width, problem.f.height, 1.0,
                              problem.f.spacing)
    return PerturbationState(problem.f, u1, delta)


def _first_order_transform(u0, u1, u1_hat, lam, dt, eps, c1, c2, ev, sym):
    nl_hat = dct2(kernels.linearized_prime(u0, u1))
    fid_hat = dct2(-lam * u1)
    rhs = u1_hat / dt + (ev / eps) * nl_hat + fid_hat - c1 * ev * u1_hat + c2 * u1_hat
    new_hat = rhs / sym
    return idct2(new_hat), new_hat


def perturbation_step(state: PerturbationState, problem: InpaintProblem,
                      config: SolverConfig, plan: SpectralPlan) -> PerturbationState:
    """Advance u0 by the deterministic scheme and u1 by its linearization.

    The linearized potential W''(u0) u1 uses the time-n leading order, so the
    u1 equation stays linear homogeneous in u1.
    """
    if not plan.matches(state.u0):
        raise ValueError("perturbation_step: state and plan grids must match")
    eps = problem.eps
    c1 = config.effective_c1(eps)
    c2 = config.effective_c2(problem.lambda0)
    sym = implicit_symbol(1.0 / config.dt, eps, c1, c2, plan)
    ev = plan.eigenvalues
    lam = problem.lam
    u0 = state.u0.values
    u1 = state.u1.values
    new0, _ = _step_transform(u0, dct2(u0), problem.f.values, lam, config.dt,
                              eps, c1, c2, ev, sym)
    new1, _ = _first_order_transform(u0, u1, dct2(u1), lam, config.dt,
                                     eps, c1, c2, ev, sym)
    if not (np.all(np.isfinite(new0)) and np.all(np.isfinite(new1))):
        raise ValueError("perturbation step produced non-finite values")
    return PerturbationState(state.u0.with_values(new0),
                             state.u1.with_values(new1), state.delta)


def perturbation_mean(state: PerturbationState) -> ScalarField:
    """Mean under Z ~ Uniform(0, delta): u0 + (delta/2) u1."""
    return state.u0.with_values(state.u0.values + 0.5 * state.delta * state.u1.values)


def first_order_variance(state: PerturbationState) -> ScalarField:
    """Var(Z) u1^2 = (delta^2 / 12) u1^2; first-order approximation only."""
    return state.u1.with_values((state.delta ** 2 / 12.0) * state.u1.values ** 2)


def ordering_ratio(state: PerturbationState) -> float:
    """delta * max|u1| / max|u0|; near or above 1 the expansion is unreliable."""
    scale = np.abs(state.u0.values).max()
    if scale == 0.0:
        return np.inf
    return float(state.delta * np.abs(state.u1.values).max() / scale)


def run_perturbation(problem: InpaintProblem, delta: float,
                     config: SolverConfig) -> tuple[PerturbationState, RunDiagnostics]:
    """Iterate both orders; the u0 trajectory is bitwise the deterministic run.

    Diagnostics follow the leading order; the residual also covers u1 so the
    run stops only when both fields settle.  The eps schedule is ignored.
    """
    plan = SpectralPlan.for_field(problem.f)
    state = initial_state(problem, delta)
    dt = config.dt
    eps = problem.eps
    c1 = config.effective_c1(eps)
    c2 = config.effective_c2(problem.lambda0)
    sym = implicit_symbol(1.0 / dt, eps, c1, c2, plan)
    ev = plan.eigenvalues
    lam = problem.lam
    f = problem.f.values
    npix = problem.f.width * problem.f.height
    h2 = problem.f.spacing ** 2

    u0 = f.copy()
    u0_hat = dct2(u0)
    u1 = np.ones_like(u0)
    u1_hat = dct2(u1)
    diag = RunDiagnostics()
    res = np.inf
    for step in range(1, config.max_steps + 1):
        new1, new1_hat = _first_order_transform(u0, u1, u1_hat, lam, dt,
                                                eps, c1, c2, ev, sym)
        new0, new0_hat = _step_transform(u0, u0_hat, f, lam, dt, eps, c1, c2,
                                         ev, sym)
        if not (np.all(np.isfinite(new0)) and np.all(np.isfinite(new1))):
            raise ValueError(f"perturbation run produced non-finite values at step {step}")
        res = float(np.sqrt(np.sum((new0 - u0) ** 2) + np.sum((new1 - u1) ** 2))
                    / (dt * np.sqrt(2 * npix)))
        u0, u0_hat, u1, u1_hat = new0, new0_hat, new1, new1_hat
        lead = ScalarField(u0, problem.f.spacing)
        e1, e2 = energies(lead, problem, plan)
        diag.append(step, step * dt, e1, e2, res, h2 * u0.sum())
        if res <= config.tol:
            break

    diag.converged = res <= config.tol
    final = PerturbationState(ScalarField(u0, problem.f.spacing),
                              ScalarField(u1, problem.f.spacing), delta)
    return final, diag
