"""Sparse linear encoders built from column selections.

An encoder ``H`` (d x k) maps a data row ``x`` to features ``H^T x``; the
information loss of ``H`` on ``X`` is the reconstruction error under the
best linear decoder, ``||X - XH (XH)^+ X||_F^2``.
"""

import math
import time
from dataclasses import dataclass, replace
from fractions import Fraction

import numpy as np
from scipy.linalg import solve_triangular

from .cssp import ColumnSelection, SelectionStrategy, span_factors
from .errors import DegenerateSelectionError, InvalidArgumentError
from .linalg import (
    RANK_TOL,
    as_matrix,
    frob2,
    independent_columns,
    pseudo_inverse,
    qr_thin,
    range_basis,
    svd,
    truncate_rank,
)

NNZ_TOL = 1e-12


@dataclass(frozen=True)
class SparseEncoder:
    """Loadings ``H`` plus the sparsity metadata each column promises.

    ``support[j]`` is the set of rows column ``j`` is allowed to use; the
    actual non-zeros (magnitude above ``NNZ_TOL``) are a subset of it.
    """

    H: np.ndarray
    budgets: tuple
    support: tuple
    mode: str
    selection: tuple = ()
    flags: tuple = ()

    @property
    def k(self):
        return self.H.shape[1]

    @property
    def d(self):
        return self.H.shape[0]

    def column_nnz(self):
        return [int(np.count_nonzero(np.abs(self.H[:, j]) > NNZ_TOL)) for j in range(self.k)]

    def check_contract(self):
        """List of sparsity-contract violations (empty when the encoder is valid)."""
        problems = []
        for j in range(self.k):
            nz = set(np.flatnonzero(np.abs(self.H[:, j]) > NNZ_TOL).tolist())
            if len(nz) > self.budgets[j]:
                problems.append(f"column {j}: {len(nz)} non-zeros exceeds budget {self.budgets[j]}")
            if not nz <= set(self.support[j]):
                problems.append(f"column {j}: non-zeros outside declared support")
        if self.mode == "batch" and self.k:
            if any(set(s) != set(self.support[0]) for s in self.support):
                problems.append("batch columns do not share one support")
            if len(self.support[0]) > min(self.budgets):
                problems.append("batch support larger than budget")
        return problems


def _loadings(H):
    if isinstance(H, SparseEncoder):
        return H.H
    H = np.asarray(H, dtype=np.float64)
    if H.ndim == 1:
        H = H[:, None]
    return H


def encode(X, H):
    """Feature matrix ``Z = X H``."""
    return np.asarray(X, dtype=np.float64) @ _loadings(H)


def reconstruct(X, H):
    """Optimal linear reconstruction ``XH (XH)^+ X`` (projection onto range(XH))."""
    X = as_matrix(X)
    basis = range_basis(X @ _loadings(H))
    return basis @ (basis.T @ X)


def information_loss(X, H):
    """``||X - XH (XH)^+ X||_F^2``; equals ``||X||_F^2`` when ``XH = 0``."""
    X = as_matrix(X)
    Hm = _loadings(H)
    if Hm.shape[1] == 0:
        return frob2(X)
    basis = range_basis(X @ Hm)
    return frob2(X - basis @ (basis.T @ X))


def optimal_decoder(X, H):
    """Least-squares decoder ``G = (XH)^+ X``."""
    X = as_matrix(X)
    return pseudo_inverse(X @ _loadings(H)) @ X


def encoder_from_columns(X, sel, k):
    """Encoder ``H = Omega U_R`` and decoder ``G = S_R V_R^T`` from chosen columns.

    ``U_R S_R V_R^T`` is the SVD of ``R^{-1} (Q^T X)_k`` where ``C = QR``.
    Then ``XHG = X_{C,k}``.  Dependent columns are removed first; if fewer
    than ``k`` independent directions remain the encoder has fewer columns.
    """
    X = as_matrix(X)
    if not isinstance(sel, ColumnSelection):
        sel = ColumnSelection.from_indices(sel, X.shape[1])
    if sel.n_cols != X.shape[1]:
        raise InvalidArgumentError(f"selection is for {sel.n_cols} columns, X has {X.shape[1]}")
    if k < 1:
        raise InvalidArgumentError(f"k must be >= 1, got {k}")
    sf = span_factors(X, sel)
    if not sf.indices:
        raise DegenerateSelectionError("every selected column is numerically zero")
    Bk = truncate_rank(svd(sf.B), k)
    M = solve_triangular(sf.R, Bk, lower=False)
    F = svd(M)
    kk = min(k, F.rank)
    H = np.zeros((X.shape[1], kk))
    H[list(sf.indices), :] = F.U[:, :kk]
    G = F.S[:kk, None] * F.V[:, :kk].T
    flags = []
    if len(sf.indices) < len(sel):
        flags.append(f"reduced_selection:{len(sel)}->{len(sf.indices)}")
    if kk < k:
        flags.append(f"fewer_columns:{kk}<{k}")
    enc = SparseEncoder(
        H=H,
        budgets=(len(sel),) * kk,
        support=(tuple(sf.indices),) * kk,
        mode="batch",
        selection=tuple(sel.indices),
        flags=tuple(flags),
    )
    return enc, G


def _select_and_encode(X, k, r, strategy):
    sel = strategy.select(X, k, r)
    return encoder_from_columns(X, sel, k)


def batch_bound_factor(k, r):
    """Expected-loss factor ``1 + 5k/(r - 5k)``, or None when ``r <= 5k``."""
    return 1.0 + 5.0 * k / (r - 5.0 * k) if r > 5 * k else None


def batch_encoder(X, k, r, strategy=None):
    """Select ``r`` columns with ``strategy`` and build the shared-support encoder.

    Returns ``(encoder, decoder, report)``.  When ``rank(X) < k`` only
    ``rank(X)`` columns are produced and the report is flagged.
    """
    from .metrics import build_report

    X = as_matrix(X)
    strategy = strategy or SelectionStrategy()
    if k < 1:
        raise InvalidArgumentError(f"k must be >= 1, got {k}")
    if r < k:
        raise InvalidArgumentError(f"sparsity r={r} must be at least k={k}")
    if r > X.shape[1]:
        raise InvalidArgumentError(f"sparsity r={r} exceeds d={X.shape[1]}")
    F = svd(X)
    if F.rank == 0:
        raise DegenerateSelectionError("X is numerically zero")
    flags = []
    k_eff = min(k, F.rank)
    if k_eff < k:
        flags.append(f"rank_deficient:{F.rank}<{k}")
    t0 = time.perf_counter()
    enc, G = _select_and_encode(X, k_eff, r, strategy)
    elapsed = time.perf_counter() - t0
    enc = replace(enc, flags=enc.flags + tuple(flags))
    report = build_report(
        X,
        enc,
        k,
        svd_factors=F,
        algorithm="batch",
        strategy=strategy,
        bound_factor=batch_bound_factor(k, r),
        sparsity=r,
        timings={"encode_s": elapsed},
    )
    return enc, G, report


def adaptive_schedule(k, eps):
    """Per-column sparsities ``r_j = 5 + ceil(5 j / eps)`` for ``j = 1..k``."""
    if k < 1:
        raise InvalidArgumentError(f"k must be >= 1, got {k}")
    if not eps > 0:
        raise InvalidArgumentError(f"eps must be positive, got {eps}")
    # decimal reading of eps so that e.g. 15/0.3 is exactly 50
    e = Fraction(repr(float(eps)))
    return [5 + math.ceil(Fraction(5 * j) / e) for j in range(1, k + 1)]


def iterative_delta(r):
    """Single-step excess factor ``5/(r-5)``, None for ``r <= 5``."""
    return 5.0 / (r - 5) if r > 5 else None


def iterative_prefix_bound(singular_values, ell, eps):
    """``(e l)^eps ||X - X_l||^2 + eps l^(1+eps) ||X_l - X_1||^2``."""
    s2 = np.asarray(singular_values, dtype=np.float64) ** 2
    tail = float(np.sum(s2[ell:]))
    head = float(np.sum(s2[1:ell]))
    return (math.e * ell) ** eps * tail + eps * ell ** (1 + eps) * head


def iterative_encoder(X, k, schedule, strategy=None, eps=None):
    """Build ``k`` columns one at a time, each from the current residual.

    Step ``i`` runs the batch construction with ``k = 1`` and sparsity
    ``schedule[i]`` on ``Delta = X - XH (XH)^+ X`` (recomputed from ``X``).
    Step ``i`` uses seed ``strategy.seed + i``.  Sparsities larger than ``d``
    are clipped to ``d``.  Returns ``(encoder, decoder, report)``; the
    report lists the information loss of every prefix ``H_1 .. H_l``.
    """
    from .metrics import build_report

    X = as_matrix(X)
    strategy = strategy or SelectionStrategy()
    schedule = [int(r) for r in schedule]
    if k < 1:
        raise InvalidArgumentError(f"k must be >= 1, got {k}")
    if len(schedule) != k:
        raise InvalidArgumentError(f"schedule has {len(schedule)} entries, expected k={k}")
    if any(r < 1 for r in schedule):
        raise InvalidArgumentError(f"every sparsity must be >= 1, got {schedule}")
    d = X.shape[1]
    flags = []
    if any(r > d for r in schedule):
        flags.append("schedule_clipped_to_d")
    budgets = [min(r, d) for r in schedule]
    F = svd(X)
    if F.rank == 0:
        raise DegenerateSelectionError("X is numerically zero")
    k_eff = min(k, F.rank)
    if k_eff < k:
        flags.append(f"rank_deficient:{F.rank}<{k}")

    X_norm = math.sqrt(frob2(X))
    cols, supports, selections, step_losses = [], [], [], []
    delta = X
    t0 = time.perf_counter()
    for i in range(k_eff):
        if math.sqrt(frob2(delta)) <= RANK_TOL * X_norm:
            flags.append(f"early_stop:residual_zero_after_{i}")
            break
        step = strategy.with_seed((strategy.seed + i) % 2**64)
        try:
            enc_i, _ = _select_and_encode(delta, 1, budgets[i], step)
        except DegenerateSelectionError:
            flags.append(f"early_stop:degenerate_residual_at_{i}")
            break
        cols.append(enc_i.H[:, 0])
        supports.append(enc_i.support[0])
        selections.append(enc_i.selection)
        H = np.column_stack(cols)
        basis = range_basis(X @ H)
        delta = X - basis @ (basis.T @ X)
        step_losses.append(frob2(delta))
    elapsed = time.perf_counter() - t0

    H = np.column_stack(cols) if cols else np.zeros((d, 0))
    enc = SparseEncoder(
        H=H,
        budgets=tuple(budgets[: len(cols)]),
        support=tuple(supports),
        mode="iterative",
        selection=tuple(selections),
        flags=tuple(flags),
    )
    G = optimal_decoder(X, H) if cols else np.zeros((0, d))
    prefix_bounds = None
    if eps is not None:
        prefix_bounds = [iterative_prefix_bound(F.S, ell, eps) for ell in range(1, len(cols) + 1)]
    report = build_report(
        X,
        enc,
        k,
        svd_factors=F,
        algorithm="iterative",
        strategy=strategy,
        bound_factor=None,
        schedule=budgets,
        eps=eps,
        step_losses=step_losses,
        step_deltas=[iterative_delta(r) for r in budgets[: len(cols)]],
        prefix_bounds=prefix_bounds,
        timings={"encode_s": elapsed},
    )
    return enc, G, report


def orthonormalize(H):
    """Orthonormal basis for ``span(H)`` using only the rows ``H`` already uses.

    Gram-Schmidt order is kept, so column ``j`` of the result only touches
    the union of the supports of the first ``j`` input columns.  Dependent
    columns are dropped and counted in ``flags``.
    """
    enc = H if isinstance(H, SparseEncoder) else None
    Hm = _loadings(H)
    d = Hm.shape[0]
    rows = np.flatnonzero(np.any(np.abs(Hm) > NNZ_TOL, axis=1))
    keep = independent_columns(Hm[rows]) if rows.size else np.zeros(0, dtype=np.intp)
    out = np.zeros((d, keep.size))
    if keep.size:
        Q, _ = qr_thin(Hm[rows][:, keep])
        out[rows] = Q
    dropped = Hm.shape[1] - keep.size
    supports, budgets, seen = [], [], set()
    for j in keep:
        seen |= set(np.flatnonzero(np.abs(Hm[:, j]) > NNZ_TOL).tolist())
        supports.append(tuple(sorted(seen)))
        budgets.append(len(seen))
    flags = tuple(enc.flags) if enc else ()
    if dropped:
        flags += (f"dropped_dependent:{dropped}",)
    return SparseEncoder(
        H=out,
        budgets=tuple(budgets),
        support=tuple(supports),
        mode=(enc.mode if enc else "dense") + "+orthonormal",
        selection=enc.selection if enc else (),
        flags=flags,
    )


def dense_encoder(H, mode="dense"):
    """Wrap a plain loadings matrix, declaring its observed non-zeros as support."""
    Hm = _loadings(H)
    supports = tuple(
        tuple(np.flatnonzero(np.abs(Hm[:, j]) > NNZ_TOL).tolist()) for j in range(Hm.shape[1])
    )
    return SparseEncoder(H=Hm, budgets=tuple(len(s) for s in supports), support=supports, mode=mode)
