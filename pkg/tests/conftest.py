import numpy as np
import pytest

from chuq import InpaintProblem, ScalarField, kernels


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    """Trigger JIT compilation once so timed tests measure the algorithms."""
    a = np.zeros((4, 4))
    kernels.double_well(a)
    kernels.double_well_prime(a)
    kernels.double_well_prime(0.5)
    kernels.linearized_prime(a, a)
    kernels.mean_shifted_prime(np.zeros((2, 4, 4)))
    kernels.mode_potential(np.zeros((2, 4, 4)), np.zeros((2, 2, 2)),
                           np.zeros((2, 2, 2, 2)), np.ones(2))


def stripe_image(n: int, width: int) -> np.ndarray:
    """Vertical bar of value 1 centered in an n x n zero field."""
    lo = n // 2 - width // 2
    img = np.zeros((n, n))
    img[:, lo:lo + width] = 1.0
    return img


def center_hole_mask(n: int, hole: int) -> np.ndarray:
    """All-known mask with a hole x hole damage square in the middle."""
    lo = n // 2 - hole // 2
    mask = np.ones((n, n))
    mask[lo:lo + hole, lo:lo + hole] = 0.0
    return mask


def stripe_problem(n=64, width=16, hole=12, lambda0=1.0, eps=1.0) -> InpaintProblem:
    """Damaged-stripe fixture: bar of 1s with a zeroed square hole."""
    img = stripe_image(n, width)
    mask = center_hole_mask(n, hole)
    return InpaintProblem(f=ScalarField(img * mask), mask=ScalarField(mask),
                          lambda0=lambda0, eps=eps)


def smooth_field(n: int, seed: int, lo=0.2, hi=0.8) -> np.ndarray:
    """Seeded band-limited field mapped into [lo, hi]."""
    rng = np.random.default_rng(seed)
    x = (np.arange(n) + 0.5) / n
    out = np.zeros((n, n))
    for _ in range(6):
        mx, my = rng.integers(0, 5, size=2)
        amp, phx, phy = rng.uniform(-1, 1, size=3)
        out += amp * np.cos(np.pi * mx * x)[None, :] * np.cos(np.pi * my * x)[:, None]
    span = out.max() - out.min()
    if span == 0:
        return np.full((n, n), 0.5 * (lo + hi))
    return lo + (hi - lo) * (out - out.min()) / span
