"""Column subset selection.

Indices are 0-based throughout. ``X_{C,k}`` denotes the best rank-``k``
approximation of ``X`` whose columns lie in the span of the selected
columns ``C = X[:, indices]``.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSelectionError, InvalidArgumentError
from .linalg import (
    RANK_TOL,
    as_matrix,
    frob2,
    independent_columns,
    qr_thin,
    svd,
    tail_energy,
    truncate_rank,
)

MAX_SEED = 2**64 - 1


def check_seed(seed):
    seed = int(seed)
    if not 0 <= seed <= MAX_SEED:
        raise InvalidArgumentError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def derive_seed(seed, i):
    """Child seed number ``i`` of ``seed`` (stable across platforms)."""
    ss = np.random.SeedSequence([check_seed(seed), int(i)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


@dataclass(frozen=True)
class ColumnSelection:
    """Strictly increasing column indices into a matrix with ``n_cols`` columns."""

    indices: tuple
    n_cols: int

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        object.__setattr__(self, "indices", idx)
        if len(idx) < 1:
            raise InvalidArgumentError("a column selection needs at least one index")
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise InvalidArgumentError(f"indices must be strictly increasing: {idx}")
        if idx[0] < 0 or idx[-1] >= self.n_cols:
            raise InvalidArgumentError(f"indices out of range [0, {self.n_cols}): {idx}")

    @classmethod
    def from_indices(cls, indices, n_cols):
        return cls(tuple(sorted(set(int(i) for i in indices))), n_cols)

    def __len__(self):
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)

    def union(self, other):
        return ColumnSelection.from_indices(set(self.indices) | set(other), self.n_cols)


def materialize_sampling(sel):
    """The ``d x r`` sampling matrix with columns ``e_{i_1}, ..., e_{i_r}``."""
    Omega = np.zeros((sel.n_cols, len(sel)))
    Omega[list(sel.indices), np.arange(len(sel))] = 1.0
    return Omega


@dataclass(frozen=True)
class SpanFactors:
    """QR data for the independent part of a selection."""

    indices: tuple  # surviving column indices, increasing
    Q: np.ndarray
    R: np.ndarray
    B: np.ndarray  # Q.T @ X
    residual2: float  # ||X - Q Q^T X||_F^2


def span_factors(X, sel):
    """Drop dependent selected columns and factor the rest as ``C = QR``."""
    X = np.asarray(X, dtype=np.float64)
    idx = np.asarray(sel.indices if isinstance(sel, ColumnSelection) else sel, dtype=np.intp)
    keep = idx[independent_columns(X[:, idx])]
    if keep.size == 0:
        n = X.shape[0]
        return SpanFactors((), np.zeros((n, 0)), np.zeros((0, 0)), np.zeros((0, X.shape[1])), frob2(X))
    Q, R = qr_thin(X[:, keep])
    B = Q.T @ X
    return SpanFactors(tuple(int(i) for i in keep), Q, R, B, frob2(X - Q @ B))


def reduce_selection(X, sel):
    """Selection with linearly dependent columns removed (later ones go first)."""
    kept = span_factors(X, sel).indices
    if not kept:
        raise DegenerateSelectionError("all selected columns are numerically zero")
    return ColumnSelection(kept, sel.n_cols)


def best_rank_k_in_span(X, sel, k):
    """``X_{C,k} = Q (Q^T X)_k`` for ``C = X[:, sel]``."""
    X = as_matrix(X)
    if k < 1:
        raise InvalidArgumentError(f"k must be >= 1, got {k}")
    if k > len(sel):
        raise InvalidArgumentError(f"k={k} exceeds the number of selected columns r={len(sel)}")
    sf = span_factors(X, sel)
    if len(sf.indices) < k:
        raise DegenerateSelectionError(
            f"selected columns span only {len(sf.indices)} directions, fewer than k={k}"
        )
    return sf.Q @ truncate_rank(svd(sf.B), k)


def span_loss(X, sel, k):
    """``||X - X_{C,k'}||_F^2`` with ``k' = min(k, rank C)``.

    Uses ``||X - Q (Q^T X)_k||^2 = ||X - Q Q^T X||^2 + sum_{i>k} s_i(Q^T X)^2``,
    which avoids forming the n x d approximation.
    """
    X = np.asarray(X, dtype=np.float64)
    sf = span_factors(X, sel)
    if not sf.indices:
        return sf.residual2
    s = np.linalg.svd(sf.B, compute_uv=False)
    return sf.residual2 + tail_energy(s, k)


def _validate_kr(X, k, r):
    d = X.shape[1]
    if k < 1:
        raise InvalidArgumentError(f"k must be >= 1, got {k}")
    if r > d:
        raise InvalidArgumentError(f"r={r} exceeds the number of columns d={d}")
    if r < k:
        raise InvalidArgumentError(f"r={r} must be at least k={k}")


def _greedy_scores(X, E, B, chosen, k_target, col_scale):
    """Loss ``||X - X_{C+j, k_target}||^2`` for every candidate column ``j``.

    ``B = Q^T X`` and ``E = X - Q B`` describe the current span.  Adding
    column ``j`` adds the direction ``q_j = E_j / ||E_j||``; the new
    projected matrix is ``[B; q_j^T E]`` whose Gram matrix is bordered by
    ``b_j = B E^T q_j`` and ``c_j = ||E^T q_j||^2``.  All candidates are
    scored with one batched symmetric eigensolve.
    """
    d = X.shape[1]
    m = B.shape[0]
    E2 = frob2(E)
    P = E.T @ E
    pjj = np.diag(P).copy()
    indep = pjj > (RANK_TOL * col_scale) ** 2
    indep[chosen] = False
    scores = np.full(d, np.inf)

    # candidates already in the span leave the projection unchanged
    A = B @ B.T
    if m > k_target:
        base_tail = float(np.sum(np.clip(np.linalg.eigvalsh(A)[: m - k_target], 0.0, None)))
    else:
        base_tail = 0.0
    dep = ~indep
    dep[chosen] = False
    scores[dep] = E2 + base_tail

    J = np.flatnonzero(indep)
    if J.size == 0:
        return scores
    root = np.sqrt(pjj[J])
    c = np.einsum("ij,ij->j", P[:, J], P[:, J]) / pjj[J]
    proj = np.clip(E2 - c, 0.0, None)
    n_tail = m + 1 - k_target
    if n_tail <= 0:
        scores[J] = proj
        return scores
    b = (B @ P[:, J]) / root  # m x |J|
    G = np.empty((J.size, m + 1, m + 1))
    G[:, :m, :m] = A
    G[:, :m, m] = b.T
    G[:, m, :m] = b.T
    G[:, m, m] = c
    lam = np.linalg.eigvalsh(G)
    tail = np.sum(np.clip(lam[:, :n_tail], 0.0, None), axis=1)
    scores[J] = proj + tail
    return scores


def select_columns_greedy(X, k, r):
    """Deterministic forward selection of ``r`` columns.

    Each step adds the column minimising ``||X - X_{C+j, min(k, |C|+1)}||_F^2``;
    exact ties go to the smallest index.
    """
    X = as_matrix(X)
    _validate_kr(X, k, r)
    n, d = X.shape
    col_scale = float(np.max(np.linalg.norm(X, axis=0)))
    chosen = []
    Q = np.zeros((n, 0))
    for step in range(r):
        B = Q.T @ X
        E = X - Q @ B
        scores = _greedy_scores(X, E, B, chosen, min(k, step + 1), col_scale)
        j = int(np.argmin(scores))
        chosen.append(j)
        v = E[:, j].copy()
        for _ in range(2):
            v -= Q @ (Q.T @ v)
        nv = np.linalg.norm(v)
        if nv > RANK_TOL * col_scale and Q.shape[1] < n:
            Q = np.column_stack([Q, v / nv])
    return ColumnSelection.from_indices(chosen, d)


def approx_top_right_singular(X, k, eps=0.5, seed=0, oversample=10, n_iter=4):
    """Orthonormal ``d x k`` estimate of the top right singular vectors.

    Gaussian range sketch of width ``k + oversample`` refined by subspace
    (power) iterations with QR re-orthonormalisation.  The iteration count
    is ``max(n_iter, ceil(ln(d) / (2 eps)))`` so smaller ``eps`` buys more
    passes over ``X``.
    """
    X = as_matrix(X)
    n, d = X.shape
    if not 0 < eps <= 1:
        raise InvalidArgumentError(f"eps must lie in (0, 1], got {eps}")
    if k < 1 or k > min(n, d):
        raise InvalidArgumentError(f"k={k} must lie in [1, min(n, d)={min(n, d)}]")
    rng = np.random.default_rng(seed)
    width = min(k + oversample, d, n)
    iters = max(n_iter, math.ceil(math.log(max(d, 2)) / (2 * eps)))
    Y = X @ rng.standard_normal((d, width))
    Q, _ = np.linalg.qr(Y)
    for _ in range(iters):
        Z, _ = np.linalg.qr(X.T @ Q)
        Q, _ = np.linalg.qr(X @ Z)
    _, _, Vt = np.linalg.svd(Q.T @ X, full_matrices=False)
    return Vt[:k].T.copy()


def _weighted_draw(rng, weights, count):
    # sequential draws without replacement, probability proportional to weight
    positive = np.count_nonzero(weights)
    count = min(count, positive)
    if count == 0:
        return np.zeros(0, dtype=np.intp)
    p = weights / weights.sum()
    return np.asarray(rng.choice(weights.size, size=count, replace=False, p=p), dtype=np.intp)


def adaptive_sample(X, sel, s, seed=0):
    """Add ``s`` columns sampled by squared residual norm after projecting onto ``sel``.

    Already-selected and (numerically) in-span columns get zero weight, so
    fewer than ``s`` columns are added when fewer have residual mass.
    """
    X = as_matrix(X)
    if s < 1:
        raise InvalidArgumentError(f"s must be >= 1, got {s}")
    sf = span_factors(X, sel)
    E = X - sf.Q @ sf.B
    w = np.einsum("ij,ij->j", E, E)
    col_scale = float(np.max(np.linalg.norm(X, axis=0)))
    w[list(sel.indices)] = 0.0
    w[w <= (RANK_TOL * col_scale) ** 2] = 0.0
    if not np.any(w):
        return sel
    rng = np.random.default_rng(seed)
    return sel.union(_weighted_draw(rng, w, s))


def select_columns_randomized(X, k, r, seed=0, eps=0.5, oversample=10, n_iter=4):
    """Leverage-score sampling of ``min(5k, r)`` columns, then one adaptive round.

    Leverage scores are the squared row norms of an approximate top-``k``
    right singular basis.  The remaining ``r - |initial|`` columns come from
    :func:`adaptive_sample`.
    """
    X = as_matrix(X)
    _validate_kr(X, k, r)
    d = X.shape[1]
    sketch_ss, lev_ss, adapt_ss = np.random.SeedSequence(check_seed(seed)).spawn(3)
    k_eff = min(k, min(X.shape))
    V = approx_top_right_singular(X, k_eff, eps=eps, seed=sketch_ss, oversample=oversample, n_iter=n_iter)
    lev = np.einsum("ij,ij->i", V, V)
    lev[lev <= 1e-20] = 0.0
    initial = _weighted_draw(np.random.default_rng(lev_ss), lev, min(5 * k, r))
    if initial.size == 0:
        # X is numerically zero; any single column is as good as another
        initial = np.array([0])
    sel = ColumnSelection.from_indices(initial, d)
    s = r - len(sel)
    if s > 0:
        sel = adaptive_sample(X, sel, s, seed=adapt_ss)
    return sel


def boost_best_of(X, k, r, trials, seed=0, **kwargs):
    """Best of ``trials`` independent randomized selections (by span loss)."""
    X = as_matrix(X)
    if trials < 1:
        raise InvalidArgumentError(f"trials must be >= 1, got {trials}")
    best, best_loss = None, np.inf
    for t in range(trials):
        sel = select_columns_randomized(X, k, r, seed=derive_seed(seed, t), **kwargs)
        loss = span_loss(X, sel, k)
        if loss < best_loss:
            best, best_loss = sel, loss
    return best


STRATEGY_KINDS = ("greedy", "randomized")
_ALIASES = {"randomized-leverage-adaptive": "randomized", "deterministic": "greedy"}


@dataclass(frozen=True)
class SelectionStrategy:
    """How to pick columns: deterministic greedy or seeded randomized sampling."""

    kind: str = "randomized"
    seed: int = 0
    trials: int = 1
    eps: float = 0.5
    oversample: int = 10
    n_iter: int = 4

    def __post_init__(self):
        kind = _ALIASES.get(self.kind, self.kind)
        if kind not in STRATEGY_KINDS:
            raise InvalidArgumentError(f"unknown selection strategy {self.kind!r}")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "seed", check_seed(self.seed))
        if self.trials < 1:
            raise InvalidArgumentError(f"trials must be >= 1, got {self.trials}")

    def with_seed(self, seed):
        return SelectionStrategy(self.kind, seed, self.trials, self.eps, self.oversample, self.n_iter)

    def select(self, X, k, r):
        if self.kind == "greedy":
            return select_columns_greedy(X, k, r)
        opts = dict(eps=self.eps, oversample=self.oversample, n_iter=self.n_iter)
        if self.trials == 1:
            return select_columns_randomized(X, k, r, seed=self.seed, **opts)
        return boost_best_of(X, k, r, self.trials, seed=self.seed, **opts)
