"""Orthogonal polynomial machinery for noise expansions.

Two families ship tested: monic Hermite-type polynomials orthogonal under a
centered Gaussian (H2 = z^2 - sigma^2, so the first polynomial is literally
z and an additive-noise initial state u + Z has coefficients (u, 1, 0, ...)),
and Legendre polynomials mapped to a uniform interval.  All expectations are
taken under probability densities, so the degree-0 norm is always 1.

Moment tensors E[Phi_i Phi_p Phi_j] and E[Phi_i Phi_p Phi_q Phi_j] mediate
the mode coupling in the intrusive solver; they are computed by Gauss rules
with enough nodes to be exact and symmetrized so permuted indices compare
equal exactly.
"""

import itertools
import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.hermite_e import hermegauss
from numpy.polynomial.legendre import leggauss

__all__ = [
    "HermiteGaussian",
    "LegendreUniform",
    "MomentTensors",
    "poly_eval",
    "norm_factor",
    "quadrature",
    "moment_tensors",
    "project",
    "evaluate_expansion",
    "projection_l2_error",
    "multivariate_indices",
    "multivariate_eval",
    "multivariate_norm",
    "multivariate_project",
]


@dataclass(frozen=True)
class HermiteGaussian:
    """Basis orthogonal under N(0, sigma^2); recurrence p_{n+1} = z p_n - n sigma^2 p_{n-1}."""

    sigma: float = 1.0
    max_degree: int = 8

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if self.max_degree < 0:
            raise ValueError(f"max_degree must be nonnegative, got {self.max_degree}")


@dataclass(frozen=True)
class LegendreUniform:
    """Legendre basis orthogonal under Uniform(a, b)."""

    a: float = -1.0
    b: float = 1.0
    max_degree: int = 8

    def __post_init__(self):
        if not self.b > self.a:
            raise ValueError(f"need a < b, got a={self.a}, b={self.b}")
        if self.max_degree < 0:
            raise ValueError(f"max_degree must be nonnegative, got {self.max_degree}")


def _check_degree(family, n: int) -> None:
    if not 0 <= n <= family.max_degree:
        raise ValueError(f"degree {n} out of range 0..{family.max_degree}")


def _eval_table(family, max_n: int, z: np.ndarray) -> np.ndarray:
    """Rows 0..max_n of the recurrence evaluated at the points z."""
    out = np.empty((max_n + 1, z.size))
    out[0] = 1.0
    if max_n == 0:
        return out
    if isinstance(family, HermiteGaussian):
        s2 = family.sigma ** 2
        out[1] = z
        for n in range(1, max_n):
            out[n + 1] = z * out[n] - n * s2 * out[n - 1]
    elif isinstance(family, LegendreUniform):
        t = (2.0 * z - family.a - family.b) / (family.b - family.a)
        out[1] = t
        for n in range(1, max_n):
            out[n + 1] = ((2 * n + 1) * t * out[n] - n * out[n - 1]) / (n + 1)
    else:
        raise TypeError(f"unsupported family {type(family).__name__}")
    return out


def poly_eval(family, n: int, z):
    """Evaluate basis polynomial n at z (scalar or array)."""
    _check_degree(family, n)
    zs = np.atleast_1d(np.asarray(z, dtype=np.float64))
    vals = _eval_table(family, n, zs.ravel())[n]
    if np.ndim(z) == 0:
        return float(vals[0])
    return vals.reshape(zs.shape)


def norm_factor(family, n: int) -> float:
    """gamma_n = E[Phi_n^2] under the family's probability density."""
    _check_degree(family, n)
    if isinstance(family, HermiteGaussian):
        return float(math.factorial(n)) * family.sigma ** (2 * n)
    if isinstance(family, LegendreUniform):
        return 1.0 / (2 * n + 1)
    raise TypeError(f"unsupported family {type(family).__name__}")


def quadrature(family, m: int) -> tuple[np.ndarray, np.ndarray]:
    """m-point Gauss rule for the family's probability density.

    Exact for polynomials of degree <= 2m - 1; the weights sum to 1.
    """
    if m < 1:
        raise ValueError(f"need at least one node, got {m}")
    if isinstance(family, HermiteGaussian):
        x, w = hermegauss(m)
        return family.sigma * x, w / w.sum()
    if isinstance(family, LegendreUniform):
        t, w = leggauss(m)
        nodes = 0.5 * (family.a + family.b) + 0.5 * (family.b - family.a) * t
        return nodes, w / w.sum()
    raise TypeError(f"unsupported family {type(family).__name__}")


@dataclass(frozen=True)
class MomentTensors:
    """Norms gamma_i plus the symmetric triple and quadruple product moments."""

    gamma: np.ndarray
    e3: np.ndarray
    e4: np.ndarray

    @property
    def order(self) -> int:
        return self.gamma.size - 1


def _symmetrize(tensor: np.ndarray) -> np.ndarray:
    """Average over index permutations, writing one shared float per orbit so
    permuted entries compare equal exactly."""
    out = np.empty_like(tensor)
    n = tensor.shape[0]
    for combo in itertools.combinations_with_replacement(range(n), tensor.ndim):
        orbit = sorted(set(itertools.permutations(combo)))
        avg = sum(tensor[ix] for ix in orbit) / len(orbit)
        for ix in orbit:
            out[ix] = avg
    out.setflags(write=False)
    return out


def moment_tensors(family, order: int, nodes: int | None = None) -> MomentTensors:
    """Build gamma, e3 and e4 for degrees 0..order by Gauss quadrature.

    The default 2*order + 3 nodes integrate the quartic products exactly.
    """
    if order < 0:
        raise ValueError(f"order must be nonnegative, got {order}")
    _check_degree(family, order)
    m = nodes if nodes is not None else 2 * order + 3
    z, w = quadrature(family, m)
    p = _eval_table(family, order, z)
    gamma = (w * p * p).sum(axis=1)
    e3 = _symmetrize(np.einsum("s,is,ps,js->ipj", w, p, p, p, optimize=True))
    e4 = _symmetrize(np.einsum("s,is,ps,qs,js->ipqj", w, p, p, p, p, optimize=True))
    gamma.setflags(write=False)
    return MomentTensors(gamma, e3, e4)


def _sample(f, nodes: np.ndarray) -> np.ndarray:
    vals = np.array([float(f(z)) for z in nodes])
    if not np.all(np.isfinite(vals)):
        raise ValueError("function returned non-finite values at quadrature nodes")
    return vals


def project(f, family, order: int, nodes: int | None = None) -> np.ndarray:
    """Coefficients E[f Phi_k] / gamma_k for k = 0..order.

    Reproduces any polynomial of degree <= order exactly (up to roundoff).
    """
    _check_degree(family, order)
    m = nodes if nodes is not None else 2 * order + 3
    z, w = quadrature(family, m)
    p = _eval_table(family, order, z)
    vals = _sample(f, z)
    gamma = np.array([norm_factor(family, k) for k in range(order + 1)])
    return (p * (w * vals)).sum(axis=1) / gamma


def evaluate_expansion(family, coeffs: np.ndarray, z):
    """Evaluate sum_k coeffs[k] Phi_k(z)."""
    coeffs = np.asarray(coeffs, dtype=np.float64)
    zs = np.atleast_1d(np.asarray(z, dtype=np.float64))
    table = _eval_table(family, coeffs.size - 1, zs.ravel())
    vals = (coeffs[:, None] * table).sum(axis=0)
    if np.ndim(z) == 0:
        return float(vals[0])
    return vals.reshape(zs.shape)


def projection_l2_error(f, family, order: int, ref_nodes: int = 64) -> float:
    """Weighted L2 distance between f and its degree-order projection,
    measured on an independent high-order quadrature."""
    coeffs = project(f, family, order)
    z, w = quadrature(family, ref_nodes)
    diff = _sample(f, z) - evaluate_expansion(family, coeffs, z)
    return float(np.sqrt((w * diff * diff).sum()))


# -- tensor-product bases for several independent noise variables ----------

def multivariate_indices(dim: int, order: int) -> list[tuple[int, ...]]:
    """Total-degree multi-index set, graded lexicographic; size C(order+dim, dim)."""
    if dim < 1:
        raise ValueError(f"dim must be at least 1, got {dim}")
    if order < 0:
        raise ValueError(f"order must be nonnegative, got {order}")
    out = []
    for total in range(order + 1):
        for combo in itertools.product(range(total + 1), repeat=dim):
            if sum(combo) == total:
                out.append(combo)
    return out


def _families_tuple(families, dim=None):
    fams = tuple(families)
    if dim is not None and len(fams) != dim:
        raise ValueError(f"expected {dim} families, got {len(fams)}")
    return fams


def multivariate_eval(families, index: tuple[int, ...], z) -> float:
    """Product basis Phi_index(z) = prod_k phi_{index_k}(z_k)."""
    fams = _families_tuple(families, len(index))
    zv = np.asarray(z, dtype=np.float64).ravel()
    if zv.size != len(index):
        raise ValueError(f"point has {zv.size} components, index has {len(index)}")
    out = 1.0
    for fam, n, zk in zip(fams, index, zv):
        out *= poly_eval(fam, n, zk)
    return float(out)


def multivariate_norm(families, index: tuple[int, ...]) -> float:
    fams = _families_tuple(families, len(index))
    out = 1.0
    for fam, n in zip(fams, index):
        out *= norm_factor(fam, n)
    return float(out)


def multivariate_project(f, families, order: int,
                         nodes: int | None = None):
    """Tensor-quadrature projection onto the total-degree basis.

    Returns (indices, coeffs); f is called with one d-vector per node.
    """
    fams = _families_tuple(families)
    dim = len(fams)
    indices = multivariate_indices(dim, order)
    m = nodes if nodes is not None else 2 * order + 3
    rules = [quadrature(fam, m) for fam in fams]
    tables = [_eval_table(fam, order, rule[0]) for fam, rule in zip(fams, rules)]

    coeffs = np.zeros(len(indices))
    for node_ids in itertools.product(range(m), repeat=dim):
        point = np.array([rules[k][0][i] for k, i in enumerate(node_ids)])
        weight = math.prod(rules[k][1][i] for k, i in enumerate(node_ids))
        fv = float(f(point))
        if not np.isfinite(fv):
            raise ValueError("function returned non-finite value at quadrature node")
        for ix, index in enumerate(indices):
            basis = math.prod(tables[k][index[k], node_ids[k]] for k in range(dim))
            coeffs[ix] += weight * fv * basis
    for ix, index in enumerate(indices):
        coeffs[ix] /= multivariate_norm(fams, index)
    return indices, coeffs
