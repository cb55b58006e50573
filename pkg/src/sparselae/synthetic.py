"""Seeded test matrices with known spectra, plus the expected shapes of reference datasets."""

import numpy as np

from .cssp import check_seed
from .errors import InvalidArgumentError, InvalidInputError

KINDS = ("power-law", "spiked", "flat", "all-ones", "gaussian")

# Datasets are not redistributed; user-supplied copies are checked against these shapes.
DATASET_SHAPES = {
    "pitprops": (13, 13),
    "colon": (500, 500),
    "lymphoma": (500, 500),
}


def random_orthonormal(rng, n, m):
    """``n x m`` matrix with orthonormal columns, Haar-distributed."""
    Z = rng.standard_normal((n, m))
    Q, R = np.linalg.qr(Z)
    return Q * np.sign(np.where(np.diag(R) == 0, 1.0, np.diag(R)))


def spectrum(kind, m, params):
    if kind == "power-law":
        decay = float(params.get("decay", 1.0))
        return np.arange(1, m + 1, dtype=np.float64) ** (-decay)
    if kind == "spiked":
        spikes = int(params.get("spikes", 3))
        spike = float(params.get("spike", 10.0))
        noise = float(params.get("noise", 0.1))
        s = np.full(m, noise)
        s[: min(spikes, m)] = spike
        return s
    if kind == "flat":
        return np.full(m, float(params.get("value", 1.0)))
    raise InvalidArgumentError(f"no prescribed spectrum for kind {kind!r}")


def generate_synthetic(kind, n, d, params=None, seed=0):
    """Generate an ``n x d`` matrix.

    * ``power-law``: singular values ``i^-decay`` (``decay`` default 1).
    * ``spiked``: ``spikes`` values equal to ``spike`` over a ``noise`` floor.
    * ``flat``: all singular values equal to ``value`` (default 1).
    * ``all-ones``: the matrix of ones (rank 1, spectral norm ``sqrt(n d)``).
    * ``gaussian``: i.i.d. standard normal entries.

    Prescribed spectra use random orthonormal singular vectors, so the
    matrix is ``U diag(s) V^T`` with ``min(n, d)`` singular values.
    """
    params = dict(params or {})
    if n < 1 or d < 1:
        raise InvalidInputError(f"dimensions must be positive, got {n}x{d}")
    if kind not in KINDS:
        raise InvalidArgumentError(f"unknown generator {kind!r}; expected one of {KINDS}")
    if kind == "all-ones":
        return np.ones((n, d))
    rng = np.random.default_rng(check_seed(seed))
    if kind == "gaussian":
        return rng.standard_normal((n, d))
    m = min(n, d)
    s = spectrum(kind, m, params)
    U = random_orthonormal(rng, n, m)
    V = random_orthonormal(rng, d, m)
    return (U * s) @ V.T


def check_dataset_shape(name, X):
    """Raise unless ``X`` has the documented shape for dataset ``name``."""
    key = name.lower()
    if key not in DATASET_SHAPES:
        raise InvalidArgumentError(f"unknown dataset {name!r}; known: {sorted(DATASET_SHAPES)}")
    want = DATASET_SHAPES[key]
    if tuple(X.shape) != want:
        raise InvalidInputError(f"{name} should be {want[0]}x{want[1]}, got {X.shape[0]}x{X.shape[1]}")
    return X
