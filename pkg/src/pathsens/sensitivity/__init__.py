"""Relative entropy rate and pathwise Fisher information from a single trajectory."""

from .accumulators import (
    Estimate,
    SensitivityAccumulator,
    block_stderr,
    combine_replicas,
    discrete_fim_accumulate,
    discrete_rer_accumulate,
    fim_accumulate,
    rer_accumulate,
)
from .analysis import (
    AsymmetryReport,
    FimReport,
    asymmetry_diagnostic,
    fim_eigen,
    fim_quadratic_rer,
    inverse_temp_rer,
    inverse_temp_rer_closed_form,
    log_beta_fim,
    log_beta_fim_closed_form,
    log_scale_fim,
    momentum_quadratic,
    pinsker_bound,
)
from .directions import (
    DEFAULT_MAGNITUDE,
    Alternative,
    PerturbationDirection,
    build_alternatives,
    parse_perturbation,
)
from .report import NORMALIZATIONS, normalizer, rer_rows, write_fim_csv, write_fim_eig_csv, write_rows
from .sink import SensitivitySink, check_fim_request

__all__ = [
    "Alternative", "AsymmetryReport", "DEFAULT_MAGNITUDE", "Estimate", "FimReport", "NORMALIZATIONS",
    "PerturbationDirection", "SensitivityAccumulator", "SensitivitySink", "asymmetry_diagnostic",
    "block_stderr", "build_alternatives", "check_fim_request", "combine_replicas",
    "discrete_fim_accumulate", "discrete_rer_accumulate", "fim_accumulate", "fim_eigen",
    "fim_quadratic_rer", "inverse_temp_rer", "inverse_temp_rer_closed_form", "log_beta_fim",
    "log_beta_fim_closed_form", "log_scale_fim", "momentum_quadratic", "normalizer",
    "parse_perturbation", "pinsker_bound", "rer_accumulate", "rer_rows", "write_fim_csv",
    "write_fim_eig_csv", "write_rows",
]
