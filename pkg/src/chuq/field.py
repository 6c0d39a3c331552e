"""Uniform-grid scalar fields and cosine-basis spectral operators.

Fields live at cell centers x_j = (j + 1/2) h of a width x height grid.
All derivatives are taken in the basis cos(pi m x / L), which satisfies the
no-flux condition on every edge by construction, keeps the Laplacian
diagonal, and makes the constant-coefficient implicit solves exact divisions
per transform coefficient.
"""

from dataclasses import dataclass

import numpy as np
import scipy.fft

__all__ = [
    "ScalarField",
    "SpectralPlan",
    "dct2",
    "idct2",
    "laplacian",
    "implicit_solve",
    "implicit_symbol",
    "integrate",
]


def dct2(values: np.ndarray) -> np.ndarray:
    """Orthonormal forward cosine transform over the last two axes."""
    return scipy.fft.dctn(values, type=2, norm="ortho", axes=(-2, -1))


def idct2(coeffs: np.ndarray) -> np.ndarray:
    """Inverse of :func:`dct2`."""
    return scipy.fft.idctn(coeffs, type=2, norm="ortho", axes=(-2, -1))


@dataclass(frozen=True)
class ScalarField:
    """A real 2-D grid function (image channel, expansion mode, potential).

    ``values`` is (height, width) float64 and is copied and frozen on
    construction, so fields can be shared across solver runs safely.
    """

    values: np.ndarray
    spacing: float = 1.0

    def __post_init__(self):
        arr = np.array(self.values, dtype=np.float64)
        if arr.ndim != 2:
            raise ValueError(f"field values must be 2-D, got shape {arr.shape}")
        h, w = arr.shape
        if h < 4 or w < 4:
            raise ValueError(f"grid must be at least 4x4, got {w}x{h}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("field values must be finite")
        if not self.spacing > 0:
            raise ValueError(f"spacing must be positive, got {self.spacing}")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)
        object.__setattr__(self, "spacing", float(self.spacing))

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @classmethod
    def constant(cls, width: int, height: int, value: float = 0.0,
                 spacing: float = 1.0) -> "ScalarField":
        return cls(np.full((height, width), float(value)), spacing)

    def with_values(self, values: np.ndarray) -> "ScalarField":
        """New field on the same grid."""
        return ScalarField(values, self.spacing)


@dataclass(frozen=True)
class SpectralPlan:
    """Eigenvalues of the Laplacian on the cosine basis of a fixed grid.

    ``eigenvalues[m, n] = -((pi m / H h)^2 + (pi n / W h)^2)``; the constant
    mode carries exactly 0 and every other entry is negative.
    """

    width: int
    height: int
    spacing: float
    eigenvalues: np.ndarray

    @classmethod
    def create(cls, width: int, height: int, spacing: float = 1.0) -> "SpectralPlan":
        if width < 4 or height < 4:
            raise ValueError(f"grid must be at least 4x4, got {width}x{height}")
        if not spacing > 0:
            raise ValueError(f"spacing must be positive, got {spacing}")
        ky = np.pi * np.arange(height) / (height * spacing)
        kx = np.pi * np.arange(width) / (width * spacing)
        ev = -(ky[:, None] ** 2 + kx[None, :] ** 2)
        ev.setflags(write=False)
        return cls(width, height, float(spacing), ev)

    @classmethod
    def for_field(cls, field: ScalarField) -> "SpectralPlan":
        return cls.create(field.width, field.height, field.spacing)

    def matches(self, field: ScalarField) -> bool:
        return (field.width == self.width and field.height == self.height
                and field.spacing == self.spacing)


def _require_match(u: ScalarField, plan: SpectralPlan, what: str) -> None:
    if not plan.matches(u):
        raise ValueError(
            f"{what}: field {u.width}x{u.height} (h={u.spacing}) does not match "
            f"plan {plan.width}x{plan.height} (h={plan.spacing})")


def laplacian(u: ScalarField, plan: SpectralPlan) -> ScalarField:
    """Apply the Laplacian symbol coefficient-wise; exact on the cosine span."""
    _require_match(u, plan, "laplacian")
    return u.with_values(idct2(plan.eigenvalues * dct2(u.values)))


def implicit_symbol(a: float, eps: float, c1: float, c2: float,
                    plan: SpectralPlan) -> np.ndarray:
    """Transform-space symbol of (a + eps*Lap^2 - c1*Lap + c2).

    Every entry is >= a > 0, so the implicit solve divides by it safely.
    """
    if not a > 0:
        raise ValueError(f"a must be positive, got {a}")
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps}")
    if c1 < 0 or c2 < 0:
        raise ValueError(f"c1 and c2 must be nonnegative, got c1={c1}, c2={c2}")
    ev = plan.eigenvalues
    return a + eps * ev * ev - c1 * ev + c2


def implicit_solve(rhs: ScalarField, a: float, eps: float, c1: float, c2: float,
                   plan: SpectralPlan) -> ScalarField:
    """Solve (a + eps*Lap^2 - c1*Lap + c2) u = rhs on the cosine basis."""
    _require_match(rhs, plan, "implicit_solve")
    sym = implicit_symbol(a, eps, c1, c2, plan)
    return rhs.with_values(idct2(dct2(rhs.values) / sym))


def integrate(u: ScalarField) -> float:
    """Mass functional h^2 * sum(values)."""
    return float(u.spacing ** 2 * u.values.sum())
