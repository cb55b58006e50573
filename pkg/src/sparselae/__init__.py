"""Sparse linear auto-encoders (sparse PCA) from column subset selection."""

__version__ = "0.1.0"

from .baselines import deflate, sparse_components_deflation, tpower
from .cssp import (
    ColumnSelection,
    SelectionStrategy,
    adaptive_sample,
    approx_top_right_singular,
    best_rank_k_in_span,
    boost_best_of,
    materialize_sampling,
    select_columns_greedy,
    select_columns_randomized,
    span_loss,
)
from .encoder import (
    SparseEncoder,
    adaptive_schedule,
    batch_encoder,
    encode,
    encoder_from_columns,
    information_loss,
    iterative_encoder,
    optimal_decoder,
    orthonormalize,
    reconstruct,
)
from .errors import (
    ConfigError,
    DegenerateSelectionError,
    InvalidArgumentError,
    InvalidInputError,
    NumericalError,
    ParseError,
    RankDeficiencyError,
    SparseLAEError,
)
from .harness import ExperimentConfig, SweepSpec, run, sweep
from .io import load_matrix, save_matrix
from .linalg import SvdFactors, pseudo_inverse, qr_thin, svd, truncate_rank
from .metrics import (
    LossReport,
    allones_sanity,
    avg_column_sparsity,
    combined_sparsity,
    normalized_information_loss,
    symmetric_explained_variance,
    variance_conversion_check,
)
from .synthetic import generate_synthetic
