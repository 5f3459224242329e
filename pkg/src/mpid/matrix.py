"""
Dense kernels: context-aware dot products and norms, spectral norm by
power iteration, and a one-sided Jacobi SVD for small matrices.

Matrices are plain 2-D float64 ``numpy`` arrays.  Context kernels run in
the accumulation dtype of the context and sum in row order (compensated
by default), so low-precision round-off is reproducible run to run.
"""

import numpy as np

from .errors import ConvergenceError, DimensionError

__all__ = [
    "dot_ctx", "column_dots_ctx", "col_norm2_ctx", "column_norms_ctx",
    "spectral_norm", "svd_small", "pinv_small",
]


def _sequential_sum(P, compensated=True):
    """Sum down axis 0 in row order, rounding every operation to P's dtype.

    With ``compensated`` the running sum carries a Kahan correction term;
    otherwise each partial sum is simply rounded.
    """
    if P.shape[0] == 0:
        return np.zeros(P.shape[1:], dtype=P.dtype)
    if not compensated:
        # add.accumulate never reorders (unlike add.reduce, which sums pairwise)
        return np.add.accumulate(P, axis=0, dtype=P.dtype)[-1]
    s = P[0].copy()
    c = np.zeros_like(s)
    y = np.empty_like(s)
    t = np.empty_like(s)
    for row in P[1:]:
        np.subtract(row, c, out=y)
        np.add(s, y, out=t)
        np.subtract(t, s, out=c)
        c -= y
        s, t = t, s
    return s


def column_dots_ctx(x, Y, ctx):
    """``x . Y[:, i]`` for every column ``i`` under ``ctx``.

    Each product is rounded to the accumulation format, then added to the
    running sum in row order.  Returns an array in the accumulation dtype.
    """
    acc = ctx.accumulation.dtype
    x = np.asarray(x, dtype=acc)
    Y = np.asarray(Y, dtype=acc)
    if Y.ndim == 1:
        Y = Y[:, None]
    if x.shape[0] != Y.shape[0]:
        raise DimensionError(f"length mismatch: {x.shape[0]} vs {Y.shape[0]}")
    with np.errstate(over="ignore", under="ignore", invalid="ignore"):
        return _sequential_sum(x[:, None] * Y, ctx.compensated)


def dot_ctx(x, y, ctx):
    """Sequential dot product of two vectors under ``ctx``."""
    x = np.asarray(x, dtype=np.float64).ravel()
    y = np.asarray(y, dtype=np.float64).ravel()
    if x.shape != y.shape:
        raise DimensionError(f"length mismatch: {x.shape[0]} vs {y.shape[0]}")
    return float(column_dots_ctx(x, y[:, None], ctx)[0])


def column_norms_ctx(W, ctx):
    """Euclidean norm of every column of ``W`` under ``ctx``."""
    acc = ctx.accumulation.dtype
    W = np.asarray(W, dtype=acc)
    with np.errstate(over="ignore", under="ignore", invalid="ignore"):
        return np.sqrt(_sequential_sum(W * W, ctx.compensated))


def col_norm2_ctx(A, j, ctx):
    """Norm of column ``j`` (0-based) of ``A`` under ``ctx``."""
    A = np.asarray(A)
    if not 0 <= j < A.shape[1]:
        raise DimensionError(f"column {j} out of range for {A.shape[1]} columns")
    return float(column_norms_ctx(A[:, j:j + 1], ctx)[0])


def spectral_norm(A, tol=1e-10, max_iter=5000, seed=0):
    """Largest singular value of ``A`` by power iteration on ``A.T @ A``.

    The start vector is drawn from ``default_rng(seed)``.  Iteration stops
    once successive estimates agree to ``tol`` relative.  Raises
    :class:`ConvergenceError` if ``max_iter`` is exhausted while the last
    relative change still exceeds ``100 * tol``.
    """
    A = np.asarray(A, dtype=np.float64)
    if tol <= 0:
        raise ValueError("tol must be positive")
    if A.size == 0:
        return 0.0
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(A.shape[1])
    x /= np.linalg.norm(x)
    prev = None
    change = np.inf
    for _ in range(max_iter):
        y = A @ x
        est = np.linalg.norm(y)
        if est == 0.0:
            if not A.any():
                return 0.0
            # start vector fell in the null space of a nonzero matrix
            return spectral_norm(A, tol, max_iter, seed + 1)
        z = A.T @ y
        x = z / np.linalg.norm(z)
        if prev is not None:
            change = abs(est - prev) / est
            if change < tol:
                return float(est)
        prev = est
    if change > 100 * tol:
        raise ConvergenceError(
            f"power iteration: relative change {change:.3e} after {max_iter} iterations")
    return float(prev)


def _jacobi_pairs(n):
    """Round-robin schedule: n-1 rounds of n/2 disjoint index pairs (n even)."""
    players = list(range(n))
    rounds = []
    for _ in range(n - 1):
        half = n // 2
        p = np.array([min(players[i], players[n - 1 - i]) for i in range(half)])
        q = np.array([max(players[i], players[n - 1 - i]) for i in range(half)])
        rounds.append((p, q))
        players = [players[0]] + [players[-1]] + players[1:-1]
    return rounds


def svd_small(A, tol=None, max_sweeps=30):
    """Thin SVD of a small dense matrix by one-sided Jacobi rotations.

    Returns ``U`` (m x r), ``S`` (r,) nonincreasing and ``V`` (n x r) with
    ``r = min(m, n)`` and ``A = U @ diag(S) @ V.T``.  Columns of ``U`` that
    belong to zero singular values are completed to an orthonormal set.
    Raises :class:`ConvergenceError` after ``max_sweeps`` sweeps.
    """
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2 or A.size == 0:
        raise DimensionError(f"expected a nonempty 2-D matrix, got shape {A.shape}")
    m, n = A.shape
    if min(m, n) > 256:
        raise DimensionError(f"svd_small is for min(m, n) <= 256, got {A.shape}")
    if m < n:
        V, S, U = svd_small(A.T, tol, max_sweeps)
        return U, S, V
    if tol is None:
        tol = np.sqrt(m) * np.finfo(np.float64).eps

    W = A.copy()
    V = np.eye(n)
    size = n + (n % 2)
    if size > n:
        W = np.hstack([W, np.zeros((m, 1))])
        V = np.pad(V, ((0, 1), (0, 1)))
    rounds = _jacobi_pairs(size) if size > 1 else []

    for _ in range(max_sweeps):
        rotated = False
        for p, q in rounds:
            Wp, Wq = W[:, p], W[:, q]
            alpha = np.einsum("ij,ij->j", Wp, Wp)
            beta = np.einsum("ij,ij->j", Wq, Wq)
            g = np.einsum("ij,ij->j", Wp, Wq)
            active = np.abs(g) > tol * np.sqrt(alpha * beta)
            if not active.any():
                continue
            rotated = True
            p, q = p[active], q[active]
            alpha, beta, g = alpha[active], beta[active], g[active]
            zeta = (beta - alpha) / (2.0 * g)
            t = np.where(zeta >= 0, 1.0, -1.0) / (np.abs(zeta) + np.sqrt(1.0 + zeta * zeta))
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = c * t
            Wp, Wq = W[:, p], W[:, q]
            W[:, p], W[:, q] = c * Wp - s * Wq, s * Wp + c * Wq
            Vp, Vq = V[:, p], V[:, q]
            V[:, p], V[:, q] = c * Vp - s * Vq, s * Vp + c * Vq
        if not rotated:
            break
    else:
        raise ConvergenceError(f"Jacobi SVD did not converge in {max_sweeps} sweeps")

    W, V = W[:, :n], V[:n, :n]
    S = np.linalg.norm(W, axis=0)
    order = np.argsort(-S, kind="stable")
    S, W, V = S[order], W[:, order], V[:, order]
    U = np.zeros((m, n))
    nz = S > 0
    U[:, nz] = W[:, nz] / S[nz]
    if not nz.all():
        U = _complete_basis(U, nz)
    return U, S, V


def _complete_basis(U, keep):
    """Replace the columns of U not flagged in ``keep`` by an orthonormal
    complement built from the standard basis vectors, in order."""
    m = U.shape[0]
    basis = [U[:, j] for j in np.flatnonzero(keep)]
    candidates = iter(range(m))
    for j in np.flatnonzero(~keep):
        for i in candidates:
            v = np.zeros(m)
            v[i] = 1.0
            for b in basis:
                v -= (b @ v) * b
            nv = np.linalg.norm(v)
            if nv > 1e-8:
                break
        U[:, j] = v / nv
        basis.append(U[:, j])
    return U


def pinv_small(A, rtol):
    """Moore-Penrose pseudo-inverse via :func:`svd_small`.

    Singular values below ``rtol * S[0]`` are treated as zero.
    """
    U, S, V = svd_small(A)
    cut = rtol * S[0] if S.size else 0.0
    inv = np.zeros_like(S)
    big = S > cut
    inv[big] = 1.0 / S[big]
    return (V * inv) @ U.T
