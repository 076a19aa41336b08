"""Low-rank compression of weight matrices via randomized subspace iteration.

The functional core lives in the submodules; the names re-exported here are
the stable public API. See the README for the command-line interface.
"""

from .decomposition import (
    ApproximationReport,
    LowRankFactors,
    RsiConfig,
    normalized_spectral_error,
    raw_power_iterate,
    rsi,
    rsvd,
    split_factors,
    truncate_svd,
)
from .errors import (
    ContractError,
    LowRankError,
    ManifestError,
    NpyBadMagicError,
    NpyFormatError,
    NpyHeaderError,
    NpyShapeError,
    NpyTruncatedError,
    NpyUnsupportedDtypeError,
    NpyVersionError,
    NumericalFailureError,
    ParameterError,
    RankDeficiencyError,
    ShapeError,
)
from .estimator import SubspaceIterationSVD
from .matrix import SvdFactors, exact_svd, gaussian_matrix, qr_orthonormalize, spectral_norm
from .planner import (
    CompressionPlan,
    LayerPlan,
    LayerSpec,
    ModelManifest,
    layer_param_counts,
    plan_model,
    rank_for_alpha,
)
from .softmax import (
    BoundReport,
    empirical_deviation,
    perturbation_bound,
    softmax,
    softmax_jacobian,
)
from .spectra import (
    PROFILES,
    SpectrumSpec,
    explicit_spectrum,
    exponential_spectrum,
    flat_spectrum,
    knee_spectrum,
    make_spectrum,
    power_law_spectrum,
    synth_matrix,
)
from .sweep import SweepConfig, SweepRow, run_sweep
from .tensor_io import (
    BOUND_REPORT_SCHEMA,
    MANIFEST_SCHEMA,
    PLAN_SCHEMA,
    read_manifest,
    read_npy,
    validate_document,
    write_json,
    write_manifest,
    write_npy,
)

__version__ = "0.1.0"

__all__ = [
    "ApproximationReport",
    "BOUND_REPORT_SCHEMA",
    "BoundReport",
    "CompressionPlan",
    "ContractError",
    "LayerPlan",
    "LayerSpec",
    "LowRankError",
    "LowRankFactors",
    "MANIFEST_SCHEMA",
    "ManifestError",
    "ModelManifest",
    "NpyBadMagicError",
    "NpyFormatError",
    "NpyHeaderError",
    "NpyShapeError",
    "NpyTruncatedError",
    "NpyUnsupportedDtypeError",
    "NpyVersionError",
    "NumericalFailureError",
    "PLAN_SCHEMA",
    "PROFILES",
    "ParameterError",
    "RankDeficiencyError",
    "RsiConfig",
    "ShapeError",
    "SpectrumSpec",
    "SubspaceIterationSVD",
    "SvdFactors",
    "SweepConfig",
    "SweepRow",
    "empirical_deviation",
    "exact_svd",
    "explicit_spectrum",
    "exponential_spectrum",
    "flat_spectrum",
    "gaussian_matrix",
    "knee_spectrum",
    "layer_param_counts",
    "make_spectrum",
    "normalized_spectral_error",
    "perturbation_bound",
    "plan_model",
    "power_law_spectrum",
    "qr_orthonormalize",
    "rank_for_alpha",
    "raw_power_iterate",
    "read_manifest",
    "read_npy",
    "rsi",
    "rsvd",
    "run_sweep",
    "softmax",
    "softmax_jacobian",
    "spectral_norm",
    "split_factors",
    "synth_matrix",
    "truncate_svd",
    "validate_document",
    "write_json",
    "write_manifest",
    "write_npy",
    "__version__",
]
