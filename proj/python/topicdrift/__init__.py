"""Topic diffusion discovery over time-sliced corpora.

Non-negative linear autoencoder topic models trained online with warm starts,
plus generalized Jensen-Shannon drift scoring against a chi-square threshold.
"""

from topicdrift._core import (
    ConfigError,
    DataError,
    DnaeConfig,
    DnaeModel,
    NumericError,
    TrainReport,
    __version__,
    align_topics,
    chi_square_quantile,
    diffusion_scores,
    entropy_kary,
    gjs,
    gradient_check,
    history_gjs,
    hnmf,
    init_model,
    nmf,
    normalize_termwise,
    rmse,
    run_pipeline,
    significance_threshold,
    tfidf,
    warm_start,
)

__all__ = [
    "ConfigError",
    "DataError",
    "DnaeConfig",
    "DnaeModel",
    "NumericError",
    "TrainReport",
    "__version__",
    "align_topics",
    "chi_square_quantile",
    "diffusion_scores",
    "entropy_kary",
    "gjs",
    "gradient_check",
    "history_gjs",
    "hnmf",
    "init_model",
    "nmf",
    "normalize_termwise",
    "rmse",
    "run_pipeline",
    "significance_threshold",
    "tfidf",
    "warm_start",
]
