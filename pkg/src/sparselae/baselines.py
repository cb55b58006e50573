"""Truncated power method with projection deflation (sparse PCA baseline)."""

from typing import NamedTuple

import numpy as np

from .cssp import check_seed
from .encoder import NNZ_TOL, SparseEncoder
from .errors import InvalidArgumentError, InvalidInputError
from .linalg import as_matrix

SYM_TOL = 1e-10


def as_symmetric(A):
    A = as_matrix(A)
    if A.shape[0] != A.shape[1]:
        raise InvalidInputError(f"expected a square matrix, got shape {A.shape}")
    scale = max(float(np.max(np.abs(A))), 1.0)
    if np.max(np.abs(A - A.T)) > SYM_TOL * scale:
        raise InvalidInputError("matrix is not symmetric")
    return A


def truncate_top(v, r):
    """Keep the ``r`` entries of largest magnitude (ties: smaller index wins)."""
    out = np.zeros_like(v)
    # stable sort on -|v| keeps the earlier index first among equal magnitudes
    idx = np.argsort(-np.abs(v), kind="stable")[:r]
    out[idx] = v[idx]
    return out


class TPowerResult(NamedTuple):
    vector: np.ndarray
    n_iter: int
    converged: bool
    degenerate: bool


def tpower(A, r, max_iters=1000, tol=1e-8, seed=0):
    """Sparse leading eigenvector of a PSD matrix by truncated power iteration.

    Iterates ``v <- normalize(truncate_top(A v, r))`` until the support is
    unchanged and ``||v_new - v|| < tol``, or ``max_iters`` is hit.

    The start vector is the leading eigenvector of ``A``, nudged towards the
    ``r`` largest diagonal entries (so near-zero eigenvector entries do not
    pick the support at random) plus a tiny seeded Gaussian perturbation,
    then truncated to ``r`` entries and normalised.
    """
    A = as_symmetric(A)
    n = A.shape[0]
    if not 1 <= r <= n:
        raise InvalidArgumentError(f"r must lie in [1, {n}], got {r}")
    rng = np.random.default_rng(check_seed(seed))
    if not np.any(A):
        v = np.zeros(n)
        v[0] = 1.0
        return TPowerResult(v, 0, True, True)

    start = np.linalg.eigh(A)[1][:, -1]
    start = start * (1.0 if start[np.argmax(np.abs(start))] >= 0 else -1.0)
    start[np.argsort(-np.diag(A), kind="stable")[:r]] += 1e-3
    start = start + 1e-6 * rng.standard_normal(n)
    v = truncate_top(start, r)
    v /= np.linalg.norm(v)
    support = np.abs(v) > 0
    for it in range(1, max_iters + 1):
        w = truncate_top(A @ v, r)
        nw = np.linalg.norm(w)
        if nw == 0.0:
            # v lies in the null space of A
            return TPowerResult(v, it, True, True)
        w /= nw
        new_support = np.abs(w) > 0
        done = np.array_equal(new_support, support) and np.linalg.norm(w - v) < tol
        v, support = w, new_support
        if done:
            return TPowerResult(v, it, True, False)
    return TPowerResult(v, max_iters, False, False)


def deflate(A, h):
    """Projection deflation ``(I - h h^T) A (I - h h^T)`` for a unit vector ``h``."""
    A = np.asarray(A, dtype=np.float64)
    h = np.asarray(h, dtype=np.float64).ravel()
    Ah = A @ h
    hAh = float(h @ Ah)
    # expanded form of P A P with P = I - h h^T
    out = A - np.outer(Ah, h) - np.outer(h, Ah) + hAh * np.outer(h, h)
    return 0.5 * (out + out.T)


def sparse_components_deflation(A, k, r, seed=0, max_iters=1000, tol=1e-8):
    """``k`` TPower components, deflating ``A`` after each one.

    Component ``i`` uses seed ``seed + i``.
    """
    A = as_symmetric(A)
    n = A.shape[0]
    if not 1 <= k <= n:
        raise InvalidArgumentError(f"k must lie in [1, {n}], got {k}")
    cols, flags = [], []
    work = A
    for i in range(k):
        res = tpower(work, r, max_iters=max_iters, tol=tol, seed=(check_seed(seed) + i) % 2**64)
        if res.degenerate:
            flags.append(f"degenerate_component:{i}")
        if not res.converged:
            flags.append(f"not_converged:{i}")
        cols.append(res.vector)
        work = deflate(work, res.vector)
    H = np.column_stack(cols)
    supports = tuple(tuple(np.flatnonzero(np.abs(c) > NNZ_TOL).tolist()) for c in cols)
    return SparseEncoder(
        H=H,
        budgets=(r,) * k,
        support=supports,
        mode="tpower-deflation",
        flags=tuple(flags),
    )
