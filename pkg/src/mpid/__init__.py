"""Mixed-precision column interpolative decompositions with emulated
low precision arithmetic."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    ConfigError, ConvergenceError, DegenerateError, DimensionError, DomainError,
    ParseError, RaggedRowsError, UnderflowError,
)
from .precision import (  # noqa: E402
    BINARY16, BINARY32, BINARY64, DOUBLE, SIMULATED_HALF, SINGLE,
    FloatFormat, PrecisionContext, gamma, round_matrix, round_scalar, round_to,
)
from .matrix import pinv_small, spectral_norm, svd_small  # noqa: E402
from .mgsqr import PivotedQR, check_orthogonality, mgsqr  # noqa: E402
from .id import (  # noqa: E402
    IDApprox, Variant, build_id, coefficient_matrix, id_pipeline, lemma_bound,
    rel_spectral_error,
)
from .synth import DecayProfile, gen_decay_matrix, profile, singular_values  # noqa: E402
from .io import load_matrix, save_matrix  # noqa: E402

__all__ = [
    "ConfigError",
    "ConvergenceError",
    "DegenerateError",
    "DimensionError",
    "DomainError",
    "ParseError",
    "RaggedRowsError",
    "UnderflowError",
    "BINARY16",
    "BINARY32",
    "BINARY64",
    "DOUBLE",
    "SIMULATED_HALF",
    "SINGLE",
    "FloatFormat",
    "PrecisionContext",
    "gamma",
    "round_matrix",
    "round_scalar",
    "round_to",
    "pinv_small",
    "spectral_norm",
    "svd_small",
    "PivotedQR",
    "check_orthogonality",
    "mgsqr",
    "IDApprox",
    "Variant",
    "build_id",
    "coefficient_matrix",
    "id_pipeline",
    "lemma_bound",
    "rel_spectral_error",
    "DecayProfile",
    "gen_decay_matrix",
    "profile",
    "singular_values",
    "load_matrix",
    "save_matrix",
]
