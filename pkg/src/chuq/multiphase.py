"""Vector-valued grayscale inpainting over a fixed set of gray levels.

Each gray level g_i carries a concentration field u_i; the image is the
weighted sum f_r = sum_i g_i u_i.  Every phase follows the scalar scheme with
one extra explicit term, the phase-mean of the well derivative, which keeps
the per-pixel concentrations summing to one: adding the Y phase equations
cancels the potential terms identically.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .field import ScalarField, SpectralPlan, dct2, idct2, implicit_symbol
from .inpaint import InpaintProblem, RunDiagnostics, SolverConfig

__all__ = [
    "PhaseStack",
    "phase_decompose",
    "reconstruct",
    "multiphase_step",
    "run_multiphase",
]

SUM_TOL = 1e-8


@dataclass(frozen=True)
class PhaseStack:
    """Concentration fields for Y gray levels; per-pixel sums stay at 1."""

    values: np.ndarray  # (Y, height, width)
    gray_values: np.ndarray  # (Y,), strictly increasing, inside [0, 1]
    spacing: float = 1.0

    def __post_init__(self):
        arr = np.array(self.values, dtype=np.float64)
        g = np.array(self.gray_values, dtype=np.float64)
        if arr.ndim != 3:
            raise ValueError(f"phase values must be 3-D, got shape {arr.shape}")
        y = arr.shape[0]
        if not 2 <= y <= 256:
            raise ValueError(f"need 2..256 gray levels, got {y}")
        if g.shape != (y,):
            raise ValueError(f"{y} phases need {y} gray values, got shape {g.shape}")
        if not np.all(np.diff(g) > 0):
            raise ValueError("gray values must be strictly increasing")
        if g[0] < 0 or g[-1] > 1:
            raise ValueError("gray values must lie in [0, 1]")
        if not np.all(np.isfinite(arr)):
            raise ValueError("phase values must be finite")
        dev = np.abs(arr.sum(axis=0) - 1.0).max()
        if dev > SUM_TOL:
            raise ValueError(f"per-pixel phase sum deviates from 1 by {dev:.3e}")
        arr.setflags(write=False)
        g.setflags(write=False)
        object.__setattr__(self, "values", arr)
        object.__setattr__(self, "gray_values", g)
        object.__setattr__(self, "spacing", float(self.spacing))

    @property
    def count(self) -> int:
        return self.values.shape[0]

    @property
    def phases(self) -> tuple[ScalarField, ...]:
        return tuple(ScalarField(v, self.spacing) for v in self.values)

    def with_values(self, values: np.ndarray) -> "PhaseStack":
        return PhaseStack(values, self.gray_values, self.spacing)


def phase_decompose(f: ScalarField, gray_values) -> PhaseStack:
    """Split an image into per-level concentrations.

    A pixel equal to g_i becomes pure phase i; anything between two levels is
    linearly interpolated (two nonzero entries summing to 1); values outside
    the range clamp to the nearest end phase.
    """
    g = np.asarray(gray_values, dtype=np.float64)
    if g.ndim != 1 or g.size < 2:
        raise ValueError("need at least two gray values")
    y = g.size
    v = np.clip(f.values, g[0], g[-1])
    idx = np.clip(np.searchsorted(g, v, side="right") - 1, 0, y - 2)
    theta = (v - g[idx]) / (g[idx + 1] - g[idx])
    values = np.zeros((y, f.height, f.width))
    rows, cols = np.indices(v.shape)
    values[idx, rows, cols] = 1.0 - theta
    values[idx + 1, rows, cols] += theta
    return PhaseStack(values, g, f.spacing)


def reconstruct(stack: PhaseStack) -> ScalarField:
    """Weighted gray-level sum of the concentrations."""
    return ScalarField(np.einsum("y,yhw->hw", stack.gray_values, stack.values),
                       stack.spacing)


def _phase_step_transform(values, values_hat, targets, lam, dt, eps, c1, c2, ev, sym):
    pot = kernels.mean_shifted_prime(values)
    fid_hat = dct2(lam * (targets - values))
    rhs = (values_hat / dt + (ev / eps) * dct2(pot) + fid_hat
           - c1 * ev * values_hat + c2 * values_hat)
    new_hat = rhs / sym
    return idct2(new_hat), new_hat


def multiphase_step(stack: PhaseStack, targets: PhaseStack, problem: InpaintProblem,
                    config: SolverConfig, plan: SpectralPlan) -> PhaseStack:
    """Advance every phase one time step; preserves the per-pixel sum."""
    if stack.values.shape != targets.values.shape:
        raise ValueError("phase stack and targets must have the same shape")
    if stack.values.shape[1:] != (plan.height, plan.width):
        raise ValueError("multiphase_step: stack and plan grids must match")
    eps = problem.eps
    c1 = config.effective_c1(eps)
    c2 = config.effective_c2(problem.lambda0)
    sym = implicit_symbol(1.0 / config.dt, eps, c1, c2, plan)
    out, _ = _phase_step_transform(stack.values, dct2(stack.values),
                                   targets.values, problem.lam, config.dt,
                                   eps, c1, c2, plan.eigenvalues, sym)
    if not np.all(np.isfinite(out)):
        raise ValueError("multiphase step produced non-finite values")
    return stack.with_values(out)


def _stack_energies(values, targets, lam0, mask, eps, spacing, ev):
    h2 = spacing ** 2
    vh = dct2(values)
    grad = -np.sum(ev * vh * vh)
    e1 = 0.5 * eps * h2 * grad + (h2 / eps) * kernels.double_well(values).sum()
    diff = targets - values
    e2 = lam0 * h2 * float((mask * diff * diff).sum())
    return float(e1), e2


def run_multiphase(problem: InpaintProblem, gray_values,
                   config: SolverConfig) -> tuple[PhaseStack, RunDiagnostics]:
    """Decompose the damaged image and drive all phases to stationarity.

    problem.f is the grayscale image; its decomposition supplies both the
    initial state and the per-phase fidelity targets.  E1/E2 sum the phase
    energies; mass tracks the reconstructed image.  The eps schedule is
    honored exactly as in the scalar run.
    """
    targets = phase_decompose(problem.f, gray_values)
    stack = targets
    plan = SpectralPlan.for_field(problem.f)
    stages = config.eps_schedule or ((problem.eps, config.max_steps),)
    dt = config.dt
    lam = problem.lam
    mask = problem.mask.values
    g = stack.gray_values
    h2 = problem.f.spacing ** 2
    nvals = stack.values.size

    values = stack.values.copy()
    values_hat = dct2(values)
    diag = RunDiagnostics()
    step = 0
    res = np.inf
    for eps, stage_steps in stages:
        c1 = config.effective_c1(eps)
        c2 = config.effective_c2(problem.lambda0)
        sym = implicit_symbol(1.0 / dt, eps, c1, c2, plan)
        for _ in range(stage_steps):
            if step >= config.max_steps:
                break
            new, new_hat = _phase_step_transform(
                values, values_hat, targets.values, lam, dt, eps, c1, c2,
                plan.eigenvalues, sym)
            step += 1
            if not np.all(np.isfinite(new)):
                raise ValueError(f"multiphase run produced non-finite values at step {step}")
            dev = np.abs(new.sum(axis=0) - 1.0).max()
            if dev > SUM_TOL:
                raise ValueError(
                    f"phase sum drifted to {dev:.3e} from 1 at step {step}")
            res = float(np.linalg.norm((new - values).ravel()) / (dt * np.sqrt(nvals)))
            values, values_hat = new, new_hat
            e1, e2 = _stack_energies(values, targets.values, problem.lambda0,
                                     mask, eps, problem.f.spacing, plan.eigenvalues)
            mass = h2 * float(np.einsum("y,yhw->", g, values))
            diag.append(step, step * dt, e1, e2, res, mass)
            if res <= config.tol:
                break
        if step >= config.max_steps:
            break

    diag.converged = res <= config.tol
    return stack.with_values(values), diag
