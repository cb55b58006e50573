"""Independent reference computations used by the tests.

These deliberately avoid the package's QR-based code paths: projections go
through ``numpy.linalg.pinv`` and truncations through a fresh full SVD.
"""

import itertools

import numpy as np


def fro2(A):
    return float(np.sum(np.asarray(A) ** 2))


def np_truncate(A, k):
    U, s, Vt = np.linalg.svd(A, full_matrices=False)
    return (U[:, :k] * s[:k]) @ Vt[:k]


def xck_oracle(X, cols, k):
    """``X_{C,k}`` as the rank-k truncation of ``C C^+ X``."""
    C = X[:, list(cols)]
    XC = C @ np.linalg.pinv(C) @ X
    return np_truncate(XC, k)


def span_loss_oracle(X, cols, k):
    return fro2(X - xck_oracle(X, cols, k))


def brute_force_opt(X, r, k):
    """Minimum of ``||X - X_{C,k}||^2`` over every r-subset of columns."""
    d = X.shape[1]
    best, arg = np.inf, None
    for cols in itertools.combinations(range(d), r):
        v = span_loss_oracle(X, cols, k)
        if v < best:
            best, arg = v, cols
    return best, arg


def naive_greedy(X, k, r):
    """Forward selection scoring each candidate from scratch."""
    chosen = []
    for step in range(r):
        scores = []
        for j in range(X.shape[1]):
            if j in chosen:
                scores.append(np.inf)
                continue
            scores.append(span_loss_oracle(X, chosen + [j], min(k, step + 1)))
        chosen.append(int(np.argmin(scores)))
    return tuple(sorted(chosen))


def loss_oracle(X, H):
    """Information loss through an explicit pinv-based least-squares decoder."""
    XH = X @ H
    return fro2(X - XH @ np.linalg.pinv(XH) @ X)


def assert_contract(enc):
    problems = enc.check_contract()
    assert not problems, problems
