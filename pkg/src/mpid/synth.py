"""
Synthetic test matrices with prescribed singular value decay.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError

__all__ = [
    "DecayProfile", "DECAY_EXPONENTS", "profile", "gen_decay_matrix",
    "singular_values", "random_orthonormal", "value_range", "column_prefix",
    "dataset_summary",
]

DECAY_EXPONENTS = {"slow": 1.0, "medium": 2.0, "fast": 4.0}


@dataclass(frozen=True)
class DecayProfile:
    """``sigma_i = i**-exponent`` for an m x n matrix drawn with ``seed``."""

    name: str
    exponent: float
    m: int = 1000
    n: int = 1000
    seed: int = 0


def profile(name, m=1000, n=1000, seed=0):
    """Named profile ``slow``, ``medium`` or ``fast``."""
    key = name.lower()
    if key not in DECAY_EXPONENTS:
        raise ValueError(f"unknown decay profile {name!r}; expected one of {sorted(DECAY_EXPONENTS)}")
    return DecayProfile(key, DECAY_EXPONENTS[key], m, n, seed)


def singular_values(prof):
    r = min(prof.m, prof.n)
    return np.arange(1, r + 1, dtype=np.float64) ** -prof.exponent


def random_orthonormal(rng, rows, cols):
    """Orthonormal columns from the QR of a Gaussian matrix, with the signs
    fixed so that R has a positive diagonal."""
    G = rng.standard_normal((rows, cols))
    Q, R = np.linalg.qr(G)
    d = np.sign(np.diag(R))
    d[d == 0] = 1.0
    return Q * d


def gen_decay_matrix(prof):
    """``U @ diag(sigma) @ V.T`` with random orthonormal ``U`` and ``V``."""
    if prof.m < 1 or prof.n < 1:
        raise DimensionError(f"bad dimensions {prof.m}x{prof.n}")
    r = min(prof.m, prof.n)
    rng = np.random.default_rng(prof.seed)
    U = random_orthonormal(rng, prof.m, r)
    V = random_orthonormal(rng, prof.n, r)
    return (U * singular_values(prof)) @ V.T


def value_range(A):
    """Largest over smallest absolute entry.

    Returns ``inf`` (with a :class:`RuntimeWarning`) when an entry is
    exactly zero.
    """
    a = np.abs(np.asarray(A, dtype=np.float64))
    lo = a.min()
    if lo == 0.0:
        warnings.warn("matrix has an exact zero entry; value range is infinite",
                      RuntimeWarning, stacklevel=2)
        return np.inf
    return float(a.max() / lo)


def column_prefix(A, n_sub):
    """The first ``n_sub`` columns of ``A``."""
    A = np.asarray(A)
    if not 1 <= n_sub <= A.shape[1]:
        raise DimensionError(f"cannot take {n_sub} columns of a {A.shape[0]}x{A.shape[1]} matrix")
    return A[:, :n_sub].copy()


def dataset_summary(A, sigma):
    """Dataset characterization: shape, sigma_50/sigma_1,
    sigma_min/sigma_1 and value range."""
    sigma = np.asarray(sigma)
    return {
        "m": A.shape[0],
        "n": A.shape[1],
        "sigma50_over_sigma1": float(sigma[min(49, sigma.size - 1)] / sigma[0]),
        "sigman_over_sigma1": float(sigma[-1] / sigma[0]),
        "value_range": value_range(A),
    }
