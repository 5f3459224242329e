"""
Rank-k column-pivoted QR by modified Gram-Schmidt under a precision context.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, UnderflowError
from .matrix import column_dots_ctx, column_norms_ctx
from .precision import DOUBLE, PrecisionContext, round_to

__all__ = ["PivotedQR", "mgsqr", "check_orthogonality"]


@dataclass
class PivotedQR:
    """``A[:, piv[:k]] = Q @ R[:, :k]`` with ``R`` upper trapezoidal.

    ``Q`` is m x k, ``R`` is k x n with columns in pivoted order and
    ``piv`` is a 0-based permutation of the columns of ``A``.
    """

    Q: np.ndarray
    R: np.ndarray
    piv: np.ndarray
    k: int
    ctx: PrecisionContext
    # piv after every step; piv_history[j] is the state after step j
    piv_history: list = None

    def truncate(self, k):
        """The rank-``k`` factorization that :func:`mgsqr` would return for
        the same input, derived from this higher-rank one."""
        if not 1 <= k <= self.k:
            raise DimensionError(f"cannot truncate rank {self.k} factorization to {k}")
        if k == self.k:
            return self
        piv = self.piv_history[k - 1].copy()
        position = np.empty_like(self.piv)
        position[self.piv] = np.arange(self.piv.size)
        R = self.R[:k, position[piv]]
        return PivotedQR(self.Q[:, :k].copy(), R, piv, k, self.ctx,
                         [p.copy() for p in self.piv_history[:k]])


def mgsqr(A, k, ctx=DOUBLE):
    """Column-pivoted modified Gram-Schmidt QR, stopped after ``k`` steps.

    Each step recomputes the norms of all remaining columns, swaps the
    largest (lowest index on ties) into place, normalizes it and removes its
    component from every trailing column.  Products and sums are rounded to
    ``ctx.accumulation``; every value written to Q, R or the working matrix
    is rounded to ``ctx.storage``.

    Parameters
    ----------
    A : (m, n) array_like
        Entries must already be representable in ``ctx.storage``.
    k : int
        Number of steps, ``1 <= k <= min(m, n)``.
    ctx : PrecisionContext

    Raises
    ------
    UnderflowError
        If a stored pivot norm is zero or its square falls below the
        smallest normal number of the accumulation format.  The exception
        carries the factorization completed so far.
    """
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2:
        raise DimensionError(f"expected a 2-D matrix, got shape {A.shape}")
    m, n = A.shape
    if not 1 <= k <= min(m, n):
        raise DimensionError(f"rank {k} out of range for a {m}x{n} matrix")
    if not ctx.is_double and not np.array_equal(round_to(A, ctx.storage), A):
        raise ValueError(f"A is not representable in {ctx.storage.name}; round it first")

    acc = ctx.accumulation.dtype
    tiny = ctx.accumulation.min_normal
    W = np.array(A, dtype=acc, order="C")
    Q = np.zeros((m, k), dtype=acc)
    R = np.zeros((k, n), dtype=acc)
    piv = np.arange(n)
    history = []

    def partial(j):
        return PivotedQR(Q[:, :j].astype(np.float64), R[:j].astype(np.float64),
                         piv.copy(), j, ctx, [p.copy() for p in history])

    with np.errstate(over="ignore", under="ignore", invalid="ignore", divide="ignore"):
        for j in range(k):
            norms = column_norms_ctx(W[:, j:], ctx)
            p = j + int(np.argmax(norms))
            if p != j:
                W[:, [j, p]] = W[:, [p, j]]
                R[:j, [j, p]] = R[:j, [p, j]]
                piv[[j, p]] = piv[[p, j]]
            rjj = ctx.store(norms[p - j])[()]
            if not rjj > 0 or float(rjj) ** 2 < tiny:
                raise UnderflowError(
                    f"pivot norm {float(rjj):.3e} underflows {ctx.name} at step {j + 1}",
                    partial=partial(j), step=j)
            R[j, j] = rjj
            q = ctx.store(W[:, j] / rjj)
            Q[:, j] = q
            if j + 1 < n:
                trailing = W[:, j + 1:]
                r = ctx.store(column_dots_ctx(q, trailing, ctx))
                R[j, j + 1:] = r
                W[:, j + 1:] = ctx.store(trailing - q[:, None] * r[None, :])
            history.append(piv.copy())

    return PivotedQR(Q.astype(np.float64), R.astype(np.float64), piv, k, ctx, history)


def check_orthogonality(qr):
    """``||Q.T Q - I||_F`` in double precision."""
    Q = np.asarray(qr.Q, dtype=np.float64)
    return float(np.linalg.norm(Q.T @ Q - np.eye(Q.shape[1])))
