"""
Column interpolative decomposition ``A ~ A[:, I] @ P`` built from a
pivoted MGS QR, in the double, mixed and low precision variants.

* ``Variant.DOUBLE``: QR in double, skeleton from the double matrix.
* ``Variant.MIXED``: QR on the rounded matrix under a low precision
  context, skeleton taken from the original double matrix.
* ``Variant.LOW``: as MIXED, but the skeleton comes from the rounded matrix.

All reconstructions are evaluated in double precision.
"""

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateError, DimensionError
from .matrix import column_dots_ctx, spectral_norm, svd_small
from .mgsqr import PivotedQR, mgsqr
from .precision import BINARY64, DOUBLE, PrecisionContext, round_matrix

__all__ = [
    "Variant", "IDApprox", "default_pinv_tol", "coefficient_matrix",
    "id_from_qr", "id_pipeline", "build_id", "rel_spectral_error", "lemma_bound",
]


class Variant(enum.Enum):
    DOUBLE = "double"
    MIXED = "mixed"
    LOW = "low"

    @property
    def skeleton_source(self):
        return "low_matrix" if self is Variant.LOW else "double_matrix"


@dataclass
class IDApprox:
    """Skeleton indices (0-based), coefficient matrix and provenance."""

    indices: np.ndarray
    P: np.ndarray
    variant: Variant
    ctx: PrecisionContext
    qr: PivotedQR = None

    @property
    def k(self):
        return self.indices.size

    @property
    def skeleton_source(self):
        return self.variant.skeleton_source

    def reconstruct(self, A_D):
        """Rebuild the approximation of ``A_D``, rounding it first for LOW."""
        A_D = np.asarray(A_D, dtype=np.float64)
        if self.variant is Variant.LOW:
            return build_id(round_matrix(A_D, self.ctx.storage), self)
        return build_id(A_D, self)


def default_pinv_tol(qr, precision="double"):
    """Pseudo-inverse cutoff relative to the largest singular value of R11.

    ``max(k, n)`` units of round-off of the format the solve runs in:
    binary64 for ``precision="double"``, the accumulation format of the
    factorization's context for ``precision="ctx"``.
    """
    u = BINARY64.unit_roundoff if precision == "double" else qr.ctx.accumulation.unit_roundoff
    return max(qr.k, qr.R.shape[1]) * u


def _pinv_factors(R11, pinv_tol):
    U, S, V = svd_small(R11)
    if S[0] == 0.0:
        raise DegenerateError("leading block R11 is identically zero")
    inv = np.zeros_like(S)
    keep = S > pinv_tol * S[0]
    inv[keep] = 1.0 / S[keep]
    return (V * inv) @ U.T


def coefficient_matrix(qr, pinv_tol=None, precision="double"):
    """``P = [I  R11^+ R12] Z^T`` as a k x n matrix.

    ``precision="double"`` solves in double.  ``precision="ctx"`` rounds the
    pseudo-inverse to the storage format of ``qr.ctx`` and forms the product
    with that context's sequential dot products, storing the result.
    """
    if pinv_tol is None:
        pinv_tol = default_pinv_tol(qr, precision)
    if pinv_tol < 0:
        raise ValueError("pinv_tol must be nonnegative")
    k, n = qr.k, qr.R.shape[1]
    R11, R12 = qr.R[:, :k], qr.R[:, k:]
    R11_pinv = _pinv_factors(R11, pinv_tol)
    if precision == "double":
        T = R11_pinv @ R12
    elif precision == "ctx":
        ctx = qr.ctx
        Rp = ctx.store(R11_pinv)
        R12c = ctx.store(R12)
        T = np.vstack([ctx.store(column_dots_ctx(Rp[i], R12c, ctx)) for i in range(k)]) \
            if n > k else np.zeros((k, 0))
        T = T.astype(np.float64)
    else:
        raise ValueError(f"precision must be 'double' or 'ctx', got {precision!r}")
    P = np.zeros((k, n))
    P[:, qr.piv[:k]] = np.eye(k)
    P[:, qr.piv[k:]] = T
    return P


def id_from_qr(qr, variant, pinv_tol=None, pinv_precision="double"):
    """Assemble the ID from a finished rank-k factorization."""
    if variant is Variant.DOUBLE and not qr.ctx.is_double:
        raise ValueError("the double variant needs a double precision factorization")
    P = coefficient_matrix(qr, pinv_tol, pinv_precision)
    return IDApprox(qr.piv[:qr.k].copy(), P, variant, qr.ctx, qr)


def id_pipeline(A_D, k, ctx=DOUBLE, variant=None, pinv_tol=None, pinv_precision="double"):
    """Rank-``k`` column ID of ``A_D`` computed under ``ctx``.

    ``A_D`` is rounded to ``ctx.storage`` before factoring.  ``variant``
    defaults to DOUBLE for the double context and MIXED otherwise.
    Propagates :class:`~mpid.errors.UnderflowError` from the QR and
    :class:`OverflowError` from rounding.
    """
    if variant is None:
        variant = Variant.DOUBLE if ctx.is_double else Variant.MIXED
    A_D = np.asarray(A_D, dtype=np.float64)
    A = A_D if ctx.is_double else round_matrix(A_D, ctx.storage)
    qr = mgsqr(A, k, ctx)
    return id_from_qr(qr, variant, pinv_tol, pinv_precision)


def build_id(source, approx):
    """``source[:, I] @ P`` in double precision."""
    source = np.asarray(source, dtype=np.float64)
    if source.shape[1] != approx.P.shape[1]:
        raise DimensionError(
            f"source has {source.shape[1]} columns, coefficients expect {approx.P.shape[1]}")
    return source[:, approx.indices] @ approx.P


def rel_spectral_error(A, Ahat, tol=1e-10, seed=0):
    """``||A - Ahat||_2 / ||A||_2`` with power-iteration norms."""
    A = np.asarray(A, dtype=np.float64)
    Ahat = np.asarray(Ahat, dtype=np.float64)
    if A.shape != Ahat.shape:
        raise DimensionError(f"shape mismatch {A.shape} vs {Ahat.shape}")
    denom = spectral_norm(A, tol=tol, seed=seed)
    if denom == 0.0:
        raise DegenerateError("reference matrix has zero spectral norm")
    return spectral_norm(A - Ahat, tol=tol, seed=seed) / denom


def lemma_bound(k, n, sigma_k1):
    """Existence bounds for a rank-k column ID of an n-column matrix.

    Returns ``(sqrt(1 + k(n-k)), sqrt(1 + k(n-k)) * sigma_k1)``: a bound on
    ``||P||_2`` and on the spectral error.
    """
    if not 1 <= k < n:
        raise ValueError(f"need 1 <= k < n, got k={k}, n={n}")
    if sigma_k1 < 0:
        raise ValueError("sigma_k1 must be nonnegative")
    c = math.sqrt(1 + k * (n - k))
    return c, c * sigma_k1
