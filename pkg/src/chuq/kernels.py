"""Pointwise hot loops, JIT-compiled with numba when available.

Every kernel has a pure-numpy twin; the active backend is chosen at import
time from the CHUQ_BACKEND environment variable:

    CHUQ_BACKEND=numba   require numba (ImportError if missing)
    CHUQ_BACKEND=numpy   force the numpy fallback
    unset / auto         numba if importable, numpy otherwise

Both paths accumulate terms in the same order, so results agree to a few
ulps (the solvers assume at most 1e-13 relative reassociation drift).
`benchmarks/benchmark_kernels.py` times the two side by side.
"""

import os

import numpy as np

__all__ = [
    "BACKEND",
    "double_well",
    "double_well_prime",
    "linearized_prime",
    "mean_shifted_prime",
    "mode_potential",
    "get_backend",
]


# -- numpy implementations -------------------------------------------------

def _double_well_np(u):
    v = u * (u - 1.0)
    return v * v


def _double_well_prime_np(u):
    # W'(u) = 4u^3 - 6u^2 + 2u, Horner form
    return ((4.0 * u - 6.0) * u + 2.0) * u


def _linearized_prime_np(u0, u1):
    # W''(u0) * u1 = (12u0^2 - 12u0 + 2) u1
    return ((12.0 * u0 - 12.0) * u0 + 2.0) * u1


def _mean_shifted_prime_np(phases):
    y = phases.shape[0]
    wp = ((4.0 * phases - 6.0) * phases + 2.0) * phases
    mean = wp[0].copy()
    for i in range(1, y):
        mean += wp[i]
    mean /= y
    return wp - mean


def _mode_potential_np(modes, e3, e4, gamma):
    n = modes.shape[0]
    out = np.empty_like(modes)
    for j in range(n):
        cubic = np.zeros(modes.shape[1:])
        quad = np.zeros(modes.shape[1:])
        for i in range(n):
            for p in range(n):
                pair = modes[i] * modes[p]
                c3 = e3[i, p, j]
                if c3 != 0.0:
                    quad += c3 * pair
                for q in range(n):
                    c4 = e4[i, p, q, j]
                    if c4 != 0.0:
                        cubic += c4 * (pair * modes[q])
        out[j] = (4.0 * cubic - 6.0 * quad) / gamma[j] + 2.0 * modes[j]
    return out


_NUMPY_BACKEND = {
    "double_well": _double_well_np,
    "double_well_prime": _double_well_prime_np,
    "linearized_prime": _linearized_prime_np,
    "mean_shifted_prime": _mean_shifted_prime_np,
    "mode_potential": _mode_potential_np,
}


# -- numba implementations -------------------------------------------------

def _build_numba_backend():
    from numba import njit

    double_well = njit(cache=True)(_double_well_np)
    double_well_prime = njit(cache=True)(_double_well_prime_np)
    linearized_prime = njit(cache=True)(_linearized_prime_np)

    @njit(cache=True)
    def mean_shifted_prime(phases):
        y, h, w = phases.shape
        out = np.empty_like(phases)
        wp = np.empty(y)
        for yy in range(h):
            for xx in range(w):
                s = 0.0
                for i in range(y):
                    u = phases[i, yy, xx]
                    wi = ((4.0 * u - 6.0) * u + 2.0) * u
                    wp[i] = wi
                    s += wi
                m = s / y
                for i in range(y):
                    out[i, yy, xx] = wp[i] - m
        return out

    @njit(cache=True)
    def mode_potential(modes, e3, e4, gamma):
        n, h, w = modes.shape
        out = np.empty_like(modes)
        v = np.empty(n)
        for yy in range(h):
            for xx in range(w):
                for i in range(n):
                    v[i] = modes[i, yy, xx]
                for j in range(n):
                    cubic = 0.0
                    quad = 0.0
                    for i in range(n):
                        for p in range(n):
                            pair = v[i] * v[p]
                            c3 = e3[i, p, j]
                            if c3 != 0.0:
                                quad += c3 * pair
                            for q in range(n):
                                c4 = e4[i, p, q, j]
                                if c4 != 0.0:
                                    cubic += c4 * (pair * v[q])
                    out[j, yy, xx] = (4.0 * cubic - 6.0 * quad) / gamma[j] + 2.0 * v[j]
        return out

    return {
        "double_well": double_well,
        "double_well_prime": double_well_prime,
        "linearized_prime": linearized_prime,
        "mean_shifted_prime": mean_shifted_prime,
        "mode_potential": mode_potential,
    }


def _select_backend():
    choice = os.environ.get("CHUQ_BACKEND", "auto").lower()
    if choice not in ("auto", "numba", "numpy"):
        raise ValueError(f"CHUQ_BACKEND must be auto, numba or numpy, got {choice!r}")
    if choice == "numpy":
        return "numpy", _NUMPY_BACKEND
    try:
        return "numba", _build_numba_backend()
    except ImportError:
        if choice == "numba":
            raise
        return "numpy", _NUMPY_BACKEND


def get_backend(name):
    """Return the kernel table for an explicit backend ('numpy' or 'numba')."""
    if name == "numpy":
        return _NUMPY_BACKEND
    if name == "numba":
        return _build_numba_backend()
    raise ValueError(f"unknown backend {name!r}")


BACKEND, _ACTIVE = _select_backend()

double_well = _ACTIVE["double_well"]
double_well_prime = _ACTIVE["double_well_prime"]
linearized_prime = _ACTIVE["linearized_prime"]
mean_shifted_prime = _ACTIVE["mean_shifted_prime"]
mode_potential = _ACTIVE["mode_potential"]
