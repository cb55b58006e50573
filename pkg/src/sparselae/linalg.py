"""Dense linear-algebra primitives.

All routines operate on float64 ``numpy`` arrays and share a single rank
cutoff: a singular value ``s`` counts as zero when ``s <= RANK_TOL * s_max``.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError, InvalidInputError, NumericalError, RankDeficiencyError

RANK_TOL = 1e-10


def as_matrix(A, name="matrix"):
    """Validate ``A`` as a finite 2-D float64 array with at least one entry."""
    try:
        A = np.asarray(A, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise InvalidInputError(f"{name} is not numeric: {exc}") from None
    if A.ndim != 2:
        raise InvalidInputError(f"{name} must be 2-D, got shape {A.shape}")
    if A.shape[0] < 1 or A.shape[1] < 1:
        raise InvalidInputError(f"{name} must have n >= 1 and d >= 1, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InvalidInputError(f"{name} has non-finite entries")
    return A


def frob2(A):
    """Squared Frobenius norm."""
    A = np.asarray(A)
    return float(np.vdot(A, A).real)


def spectral_norm(A):
    A = np.asarray(A, dtype=np.float64)
    if A.size == 0:
        return 0.0
    return float(np.linalg.norm(A, 2))


def _fix_signs(U, V):
    # largest-magnitude entry of each right singular vector is made non-negative
    if V.shape[1] == 0:
        return U, V
    idx = np.argmax(np.abs(V), axis=0)
    signs = np.sign(V[idx, np.arange(V.shape[1])])
    signs[signs == 0] = 1.0
    return U * signs, V * signs


@dataclass(frozen=True)
class SvdFactors:
    """Thin SVD ``A = U @ diag(S) @ V.T`` restricted to the numerical rank."""

    U: np.ndarray
    S: np.ndarray
    V: np.ndarray

    @property
    def rank(self):
        return int(self.S.shape[0])

    @property
    def shape(self):
        return (self.U.shape[0], self.V.shape[0])

    def reconstruct(self):
        return (self.U * self.S) @ self.V.T


def svd(A):
    """Thin SVD of ``A`` with numerically zero singular values dropped.

    Singular vectors are sign-normalised so that the entry of largest
    magnitude in every column of ``V`` is non-negative; the matching column
    of ``U`` is flipped with it.
    """
    A = as_matrix(A)
    try:
        U, S, Vt = np.linalg.svd(A, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(
            f"SVD did not converge for {A.shape[0]}x{A.shape[1]} matrix "
            f"(frobenius norm {np.sqrt(frob2(A)):.6g}): {exc}"
        ) from None
    if S.size == 0 or S[0] == 0.0:
        rank = 0
    else:
        rank = int(np.count_nonzero(S > RANK_TOL * S[0]))
    U, V = _fix_signs(U[:, :rank], Vt[:rank].T)
    return SvdFactors(U=U, S=S[:rank].copy(), V=V)


def truncate_rank(F, k):
    """Best rank-``k`` approximation ``U_k diag(S_k) V_k^T`` from SVD factors."""
    if k < 1:
        raise InvalidArgumentError(f"k must be >= 1, got {k}")
    k = min(k, F.rank)
    return (F.U[:, :k] * F.S[:k]) @ F.V[:, :k].T


def best_rank_k(A, k):
    """Shortcut for ``truncate_rank(svd(A), k)``."""
    return truncate_rank(svd(A), k)


def tail_energy(S, k):
    """Sum of squared singular values beyond index ``k``."""
    S = np.asarray(S, dtype=np.float64)
    return float(np.sum(S[k:] ** 2))


def _qr_scale(C):
    # cheap proxy for sigma_max(C): max column norm lies in [s_max/sqrt(r), s_max]
    return float(np.max(np.linalg.norm(C, axis=0))) if C.size else 0.0


def qr_thin(C):
    """Thin QR factorization with positive diagonal in ``R``.

    Raises RankDeficiencyError naming the first column whose ``|R_ii|`` falls
    at or below ``RANK_TOL`` times the largest column norm of ``C``.
    """
    C = as_matrix(C)
    n, r = C.shape
    if r > n:
        raise RankDeficiencyError(f"{n}x{r} matrix cannot have full column rank", n)
    Q, R = np.linalg.qr(C, mode="reduced")
    signs = np.sign(np.diag(R))
    signs[signs == 0] = 1.0
    Q = Q * signs
    R = R * signs[:, None]
    scale = _qr_scale(C)
    diag = np.abs(np.diag(R))
    bad = np.flatnonzero(diag <= RANK_TOL * scale) if scale > 0 else np.arange(r)
    if bad.size:
        raise RankDeficiencyError("matrix is numerically rank deficient", int(bad[0]))
    return Q, R


def independent_columns(C):
    """Positions of the columns of ``C`` that survive dependent-column removal.

    A column is dropped when its distance to the span of the kept preceding
    columns (``|R_jj|`` of an unpivoted QR) is at or below the rank cutoff.
    """
    C = np.asarray(C, dtype=np.float64)
    n, r = C.shape
    scale = _qr_scale(C)
    if r == 0 or scale == 0.0:
        return np.zeros(0, dtype=np.intp)
    Q = np.zeros((n, min(n, r)))
    keep = []
    for j in range(r):
        m = len(keep)
        if m == n:
            break
        v = C[:, j].copy()
        for _ in range(2):
            v -= Q[:, :m] @ (Q[:, :m].T @ v)
        nv = np.linalg.norm(v)
        if nv > RANK_TOL * scale:
            Q[:, m] = v / nv
            keep.append(j)
    return np.asarray(keep, dtype=np.intp)


def pseudo_inverse(A):
    """Moore-Penrose pseudo-inverse via the rank-truncated SVD."""
    A = as_matrix(A)
    F = svd(A)
    if F.rank == 0:
        return np.zeros((A.shape[1], A.shape[0]))
    return (F.V / F.S) @ F.U.T


def range_basis(A):
    """Orthonormal basis for the column space of ``A`` (possibly zero columns)."""
    A = np.asarray(A, dtype=np.float64)
    if A.shape[1] == 0 or not np.any(A):
        return np.zeros((A.shape[0], 0))
    return svd(A).U


def project_residual(X, basis):
    """``X - basis @ basis.T @ X`` for an orthonormal ``basis``."""
    if basis.shape[1] == 0:
        return X.copy()
    return X - basis @ (basis.T @ X)
