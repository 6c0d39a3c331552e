"""Haar wavelet basis on [0, 1) as an alternative noise representation.

The basis collects the box scaling function with the dyadic wavelets
psi_{j,k}(x) = 2^{j/2} beta(2^j x - k), beta being +1 on the left half of
[0, 1) and -1 on the right.  Everything here is diagnostic: projections of
functions of the noise variable, moments, and product integrals, all exact
for dyadic step functions.  The basis is not wired into the time steppers.
"""

from dataclasses import dataclass

import numpy as np

__all__ = [
    "haar_mother",
    "scaling_eval",
    "wavelet_eval",
    "basis_eval",
    "HaarBasis",
    "wavelet_project",
    "expand",
    "vanishing_moment",
    "product_moment",
]

Label = tuple[str, int, int]


def haar_mother(x):
    """+1 on [0, 1/2), -1 on [1/2, 1), 0 elsewhere (left-closed pieces)."""
    xs = np.asarray(x, dtype=np.float64)
    out = np.where((xs >= 0.0) & (xs < 0.5), 1.0,
                   np.where((xs >= 0.5) & (xs < 1.0), -1.0, 0.0))
    return float(out[()]) if np.ndim(x) == 0 else out


def scaling_eval(k: int, x):
    """Indicator of [k, k+1)."""
    xs = np.asarray(x, dtype=np.float64) - k
    out = np.where((xs >= 0.0) & (xs < 1.0), 1.0, 0.0)
    return float(out[()]) if np.ndim(x) == 0 else out


def wavelet_eval(j: int, k: int, x):
    """psi_{j,k}(x) = 2^{j/2} beta(2^j x - k); unit L2 norm."""
    if j < 0:
        raise ValueError(f"level must be nonnegative, got {j}")
    return 2.0 ** (j / 2.0) * haar_mother((2.0 ** j) * np.asarray(x, dtype=np.float64) - k)


def basis_eval(j: int, k: int, x, kind: str = "psi"):
    """Spec-facing dispatch: kind 'phi' for scaling, 'psi' for wavelets."""
    if kind == "phi":
        return scaling_eval(k, x)
    if kind == "psi":
        return wavelet_eval(j, k, x)
    raise ValueError(f"kind must be phi or psi, got {kind!r}")


@dataclass(frozen=True)
class HaarBasis:
    """All basis functions supported on [0, 1) down to wavelet level J.

    2^(J+1) functions in total: one box plus 2^j wavelets per level j <= J.
    Pairwise orthonormal under the uniform density on [0, 1).
    """

    levels: int

    def __post_init__(self):
        if self.levels < 0:
            raise ValueError(f"levels must be nonnegative, got {self.levels}")

    @property
    def labels(self) -> tuple[Label, ...]:
        out = [("phi", 0, 0)]
        for j in range(self.levels + 1):
            out.extend(("psi", j, k) for k in range(2 ** j))
        return tuple(out)

    def eval(self, label: Label, x):
        kind, j, k = label
        if j > self.levels:
            raise ValueError(f"level {j} exceeds basis levels {self.levels}")
        return basis_eval(j, k, x, kind)


def _midpoints(resolution: int) -> np.ndarray:
    return (np.arange(resolution) + 0.5) / resolution


def wavelet_project(f, levels: int, resolution: int | None = None):
    """Inner products <f, b> over [0, 1) by dyadic midpoint quadrature.

    The default resolution 2^(levels+1) makes the rule exact whenever f is
    piecewise constant on the level-(levels+1) dyadic grid.  Returns
    {label: coefficient}.
    """
    basis = HaarBasis(levels)
    m = resolution if resolution is not None else 2 ** (levels + 1)
    if m < 2 ** (levels + 1):
        raise ValueError(f"resolution {m} cannot resolve level {levels}")
    x = _midpoints(m)
    fx = np.asarray([float(f(xi)) for xi in x])
    return {label: float((fx * basis.eval(label, x)).mean())
            for label in basis.labels}


def expand(coeffs: dict, x):
    """Evaluate the expansion sum_b coeffs[b] * b(x)."""
    xs = np.asarray(x, dtype=np.float64)
    out = np.zeros_like(xs, dtype=np.float64)
    for (kind, j, k), c in coeffs.items():
        out = out + c * basis_eval(j, k, xs, kind)
    return float(out[()]) if np.ndim(x) == 0 else out


def vanishing_moment(j: int, k: int, p: int, kind: str = "psi") -> float:
    """Exact integral of z^p times a basis function (closed-form dyadic pieces).

    Haar wavelets integrate to zero (p = 0) for every (j, k).
    """
    if p < 0:
        raise ValueError(f"moment order must be nonnegative, got {p}")
    if kind == "phi":
        a, b = float(k), float(k + 1)
        return (b ** (p + 1) - a ** (p + 1)) / (p + 1)
    if kind != "psi":
        raise ValueError(f"kind must be phi or psi, got {kind!r}")
    if j < 0:
        raise ValueError(f"level must be nonnegative, got {j}")
    width = 2.0 ** (-j)
    a = k * width
    mid = a + width / 2.0
    b = a + width
    scale = 2.0 ** (j / 2.0)
    left = mid ** (p + 1) - a ** (p + 1)
    right = b ** (p + 1) - mid ** (p + 1)
    return scale * (left - right) / (p + 1)


def product_moment(labels, resolution: int | None = None) -> float:
    """E[prod b_i(Z)] for Z uniform on [0, 1).

    Midpoint quadrature at the finest level present is exact because the
    product is piecewise constant on that dyadic grid.
    """
    labels = list(labels)
    if not labels:
        raise ValueError("need at least one basis function")
    finest = max((j for kind, j, k in labels if kind == "psi"), default=0)
    m = resolution if resolution is not None else 2 ** (finest + 1)
    x = _midpoints(m)
    prod = np.ones_like(x)
    for kind, j, k in labels:
        prod = prod * basis_eval(j, k, x, kind)
    return float(prod.mean())
