"""Loss metrics, sparsity accounting and the run report.

PCA reference quantities (``||X - X_k||_F^2``, ``||X_k||_F^2``) always
come from the exact SVD, whichever selection strategy produced ``H``.
"""

import json
import math
from dataclasses import asdict, dataclass, field, fields
from typing import NamedTuple, Optional

import numpy as np

from .encoder import NNZ_TOL, SparseEncoder, _loadings, information_loss
from .errors import InvalidArgumentError, NumericalError
from .linalg import as_matrix, frob2, range_basis, spectral_norm, svd

DEGENERATE_TOL = 1e-12


def _svd_of(X, svd_factors):
    return svd_factors if svd_factors is not None else svd(X)


def pca_loss(X, k, svd_factors=None):
    """``||X - X_k||_F^2``."""
    F = _svd_of(X, svd_factors)
    return float(np.sum(F.S[k:] ** 2))


def pca_energy(X, k, svd_factors=None):
    """``||X_k||_F^2``."""
    F = _svd_of(X, svd_factors)
    return float(np.sum(F.S[:k] ** 2))


def normalized_information_loss(X, H, k=None, svd_factors=None):
    """Information loss divided by the PCA loss at rank ``k``.

    When ``X`` has rank at most ``k`` the PCA loss is zero; the ratio is then
    1 if the encoder also loses (numerically) nothing and ``inf`` otherwise.
    """
    X = as_matrix(X)
    k = _loadings(H).shape[1] if k is None else k
    loss = information_loss(X, H)
    ref = pca_loss(X, k, svd_factors)
    if ref == 0.0:
        return 1.0 if loss <= DEGENERATE_TOL * frob2(X) else math.inf
    return loss / ref


def symmetric_loss(X, H):
    """``||X - X H H^+||_F^2`` (reconstruction through the symmetric decoder ``H^+``)."""
    X = as_matrix(X)
    basis = range_basis(_loadings(H))
    return frob2(X - (X @ basis) @ basis.T)


def symmetric_variance(X, H):
    """``||X H H^+||_F^2``."""
    X = as_matrix(X)
    basis = range_basis(_loadings(H))
    return frob2(X @ basis)


def symmetric_explained_variance(X, H, k=None, svd_factors=None):
    """``||X H H^+||_F^2 / ||X_k||_F^2``; at most 1 for ``k`` columns."""
    X = as_matrix(X)
    k = _loadings(H).shape[1] if k is None else k
    return symmetric_variance(X, H) / pca_energy(X, k, svd_factors)


class VarianceCheck(NamedTuple):
    lhs: float  # ||X H H^+||^2
    rhs: float  # ||X_k||^2 - eps ||X - X_k||^2
    weak_rhs: float  # (1 - (rho - k) eps / k) ||X_k||^2
    eps: float
    holds: bool


def variance_conversion_check(X, H, k=None, svd_factors=None, tol=1e-8):
    """Check that a ``(1+eps)`` reconstruction bound implies the variance bound.

    ``eps`` is defined by ``||X - XHH^+||^2 = (1 + eps) ||X - X_k||^2``.
    The inequality holds when ``lhs >= rhs >= weak_rhs`` up to
    ``tol * ||X||_F^2``.
    """
    X = as_matrix(X)
    F = _svd_of(X, svd_factors)
    k = _loadings(H).shape[1] if k is None else k
    rho = F.rank
    lhs = symmetric_variance(X, H)
    res = symmetric_loss(X, H)
    tail = pca_loss(X, k, F)
    head = pca_energy(X, k, F)
    excess = res - tail  # eps * ||X - X_k||^2
    rhs = head - excess
    if tail > 0.0:
        eps = excess / tail
        weak = (1.0 - (rho - k) / k * eps) * head
    else:
        eps = 0.0 if excess <= tol * frob2(X) else math.inf
        weak = rhs
    slack = tol * max(frob2(X), 1.0)
    holds = lhs >= rhs - slack and rhs >= weak - slack
    return VarianceCheck(lhs, rhs, weak, eps, bool(holds))


def per_column_sparsity(H):
    Hm = _loadings(H)
    return [int(np.count_nonzero(np.abs(Hm[:, j]) > NNZ_TOL)) for j in range(Hm.shape[1])]


def combined_sparsity(H):
    """Number of rows of ``H`` with any entry above ``NNZ_TOL`` in magnitude."""
    Hm = _loadings(H)
    return int(np.count_nonzero(np.any(np.abs(Hm) > NNZ_TOL, axis=1)))


def avg_column_sparsity(H):
    nnz = per_column_sparsity(H)
    return float(sum(nnz)) / len(nnz) if nnz else 0.0


def allones_sanity(n, d, r, trials=1000, seed=0):
    """Largest ``||A v||^2 / ||A||_2^2`` over ``r``-sparse unit ``v`` for the all-ones ``A``.

    The equal-weight vector on any ``r`` coordinates attains ``r/d``; random
    sparse unit vectors are sampled as well and none may exceed it.
    """
    if not 1 <= r <= d:
        raise InvalidArgumentError(f"r must lie in [1, d={d}], got {r}")
    A = np.ones((n, d))
    top = spectral_norm(A) ** 2
    rng = np.random.default_rng(seed)
    v = np.zeros(d)
    v[:r] = 1.0 / math.sqrt(r)
    equal = frob2(A @ v) / top
    best = equal
    for _ in range(trials):
        v = np.zeros(d)
        S = rng.choice(d, size=r, replace=False)
        v[S] = rng.standard_normal(r)
        v /= np.linalg.norm(v)
        best = max(best, frob2(A @ v) / top)
    if abs(equal - r / d) > 1e-9 or best > r / d + 1e-9:
        raise NumericalError(f"all-ones check failed: equal-weight {equal}, max {best}, r/d {r / d}")
    return best


def _num(x):
    if x is None:
        return None
    x = float(x)
    if math.isfinite(x):
        return x
    return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")


def _unnum(x):
    if isinstance(x, str):
        return float(x)
    return x


_FLOAT_FIELDS = {
    "info_loss",
    "info_loss_normalized",
    "sym_explained_variance",
    "sym_loss",
    "pca_loss",
    "bound_factor",
    "avg_column_sparsity",
    "eps",
}
_FLOAT_LIST_FIELDS = {"step_losses", "step_deltas", "prefix_bounds", "step_losses_normalized"}


@dataclass
class LossReport:
    """Everything measured for one encoder on one matrix."""

    algorithm: str
    k: int
    n: int
    d: int
    n_columns: int
    info_loss: float
    info_loss_normalized: float
    sym_explained_variance: float
    sym_loss: float
    pca_loss: float
    bound_factor: Optional[float]
    per_column_sparsity: list
    combined_sparsity: int
    avg_column_sparsity: float
    support: list
    selection: list
    sparsity: Optional[int] = None
    schedule: Optional[list] = None
    eps: Optional[float] = None
    strategy: Optional[str] = None
    trials: Optional[int] = None
    seed: Optional[int] = None
    reduced_cardinality: Optional[int] = None
    step_losses: Optional[list] = None
    step_losses_normalized: Optional[list] = None
    step_deltas: Optional[list] = None
    prefix_bounds: Optional[list] = None
    flags: list = field(default_factory=list)
    external_baselines: dict = field(default_factory=lambda: {"gpower_l0": None, "gpower_l1": None})
    timings: dict = field(default_factory=dict)

    def to_dict(self, include_timings=False):
        out = asdict(self)
        if not include_timings:
            out.pop("timings")
        for key in _FLOAT_FIELDS:
            out[key] = _num(out[key])
        for key in _FLOAT_LIST_FIELDS:
            if out[key] is not None:
                out[key] = [_num(v) for v in out[key]]
        out["external_baselines"] = {k: _num(v) for k, v in out["external_baselines"].items()}
        return out

    @classmethod
    def from_dict(cls, data):
        known = {f.name for f in fields(cls)}
        data = {k: v for k, v in data.items() if k in known}
        for key in _FLOAT_FIELDS & data.keys():
            data[key] = _unnum(data[key])
        for key in _FLOAT_LIST_FIELDS & data.keys():
            if data[key] is not None:
                data[key] = [_unnum(v) for v in data[key]]
        if "external_baselines" in data:
            data["external_baselines"] = {k: _unnum(v) for k, v in data["external_baselines"].items()}
        return cls(**data)

    def to_json(self, include_timings=False):
        return json.dumps(self.to_dict(include_timings), indent=2, allow_nan=False)

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def build_report(
    X,
    enc,
    k,
    svd_factors=None,
    algorithm="batch",
    strategy=None,
    bound_factor=None,
    sparsity=None,
    schedule=None,
    eps=None,
    seed=None,
    step_losses=None,
    step_deltas=None,
    prefix_bounds=None,
    timings=None,
):
    """Assemble a :class:`LossReport` for encoder ``enc`` on ``X``."""
    X = as_matrix(X)
    F = _svd_of(X, svd_factors)
    if not isinstance(enc, SparseEncoder):
        from .encoder import dense_encoder

        enc = dense_encoder(enc)
    ref = pca_loss(X, k, F)
    if enc.k:
        loss = information_loss(X, enc)
        nloss = normalized_information_loss(X, enc, k, F)
        sev = symmetric_explained_variance(X, enc, k, F)
        sloss = symmetric_loss(X, enc)
    else:
        loss = sloss = frob2(X)
        nloss = loss / ref if ref > 0 else math.inf
        sev = 0.0
    step_norm = None
    if step_losses is not None:
        step_norm = []
        for ell, value in enumerate(step_losses, start=1):
            base = pca_loss(X, ell, F)
            step_norm.append(value / base if base > 0 else (1.0 if value <= DEGENERATE_TOL * frob2(X) else math.inf))
    reduced = None
    if enc.mode == "batch" and enc.k:
        reduced = len(enc.support[0])
    if strategy is not None and seed is None:
        seed = strategy.seed
    return LossReport(
        algorithm=algorithm,
        k=int(k),
        n=int(X.shape[0]),
        d=int(X.shape[1]),
        n_columns=int(enc.k),
        info_loss=loss,
        info_loss_normalized=nloss,
        sym_explained_variance=sev,
        sym_loss=sloss,
        pca_loss=ref,
        bound_factor=bound_factor,
        per_column_sparsity=per_column_sparsity(enc),
        combined_sparsity=combined_sparsity(enc),
        avg_column_sparsity=avg_column_sparsity(enc),
        support=[list(s) for s in enc.support],
        selection=[list(s) if isinstance(s, tuple) else s for s in enc.selection],
        sparsity=sparsity,
        schedule=list(schedule) if schedule is not None else None,
        eps=eps,
        strategy=strategy.kind if strategy is not None else None,
        trials=strategy.trials if strategy is not None else None,
        seed=seed,
        reduced_cardinality=reduced,
        step_losses=step_losses,
        step_losses_normalized=step_norm,
        step_deltas=step_deltas,
        prefix_bounds=prefix_bounds,
        flags=list(enc.flags),
        timings=dict(timings or {}),
    )
