"""Statistics of mode expansions and the sampling-based reference solver.

The mean of an expansion sum_i u_i Phi_i is u_0 (every higher basis function
has zero mean) and orthogonality turns the variance into a weighted sum of
squared modes.  ``monte_carlo`` provides the non-intrusive cross-check: it
reruns the deterministic solver per noise draw with a counter-based generator
keyed by (seed, sample index), so results are reproducible bit for bit and
independent of evaluation order.
"""

from dataclasses import dataclass

import numpy as np
from numpy.random import Generator, Philox

from .field import ScalarField, SpectralPlan, dct2, implicit_symbol
from .galerkin import ModeStack
from .inpaint import InpaintProblem, SolverConfig, _step_transform

__all__ = [
    "mean_field",
    "variance_field",
    "NoiseSpec",
    "sample_offset",
    "MonteCarloResult",
    "monte_carlo",
]


def mean_field(stack: ModeStack) -> ScalarField:
    """Expected solution field: mode 0."""
    return ScalarField(stack.values[0], stack.spacing)


def variance_field(stack: ModeStack) -> ScalarField:
    """Pointwise variance sum_{i>=1} gamma_i u_i^2; nonnegative by construction."""
    gamma = stack.tensors.gamma
    var = np.einsum("i,ihw->hw", gamma[1:], stack.values[1:] ** 2)
    return ScalarField(var, stack.spacing)


@dataclass(frozen=True)
class NoiseSpec:
    """Distribution of the scalar noise added to the initial image.

    kind 'gaussian' draws N(0, scale^2); kind 'uniform' draws Uniform(0, scale).
    """

    kind: str
    scale: float

    def __post_init__(self):
        if self.kind not in ("gaussian", "uniform"):
            raise ValueError(f"noise kind must be gaussian or uniform, got {self.kind!r}")
        if self.scale < 0:
            raise ValueError(f"noise scale must be nonnegative, got {self.scale}")


def sample_offset(noise: NoiseSpec, seed: int, index: int) -> float:
    """Noise draw for one sample; a pure function of (seed, index)."""
    gen = Generator(Philox(key=np.array([seed, index], dtype=np.uint64)))
    if noise.kind == "gaussian":
        return float(gen.standard_normal() * noise.scale)
    return float(gen.random() * noise.scale)


@dataclass(frozen=True)
class MonteCarloResult:
    mean: ScalarField
    variance: ScalarField
    stderr: ScalarField
    samples: int


def monte_carlo(problem: InpaintProblem, noise: NoiseSpec, samples: int,
                seed: int, config: SolverConfig, steps: int | None = None,
                start_index: int = 0) -> MonteCarloResult:
    """Sample mean/variance/standard error of the solution under initial noise.

    Each sample starts from f + Z and runs the deterministic scheme for a
    fixed number of steps (default config.max_steps) so trajectories stay
    comparable with an intrusive run of the same length; no early stopping.
    Sample i draws from the stream keyed by (seed, start_index + i), so a run
    can be sharded over index ranges and reassembled exactly.
    """
    if samples < 2:
        raise ValueError(f"need at least 2 samples, got {samples}")
    nsteps = config.max_steps if steps is None else int(steps)
    plan = SpectralPlan.for_field(problem.f)
    eps = problem.eps
    c1 = config.effective_c1(eps)
    c2 = config.effective_c2(problem.lambda0)
    sym = implicit_symbol(1.0 / config.dt, eps, c1, c2, plan)
    ev = plan.eigenvalues
    f = problem.f.values
    lam = problem.lam

    results = np.empty((samples,) + f.shape)
    for s in range(samples):
        z = sample_offset(noise, seed, start_index + s)
        u = f + z
        u_hat = dct2(u)
        for _ in range(nsteps):
            u, u_hat = _step_transform(u, u_hat, f, lam, config.dt, eps,
                                       c1, c2, ev, sym)
        if not np.all(np.isfinite(u)):
            raise ValueError(f"sample {s} produced non-finite values")
        results[s] = u

    mean = results.mean(axis=0)
    variance = results.var(axis=0, ddof=1)
    stderr = np.sqrt(variance / samples)
    spacing = problem.f.spacing
    return MonteCarloResult(ScalarField(mean, spacing),
                            ScalarField(variance, spacing),
                            ScalarField(stderr, spacing), samples)
