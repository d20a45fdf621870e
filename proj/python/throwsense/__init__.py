"""Mistake-aware intent recognition for a target-throwing task."""

from ._core import (
    ThrowsenseError,
    __version__,
    build_prior,
    butterworth_lowpass,
    class_weights,
    compute_metrics,
    detect_throw_frame,
    evaluate,
    frontal_scores,
    generate_dataset,
    interpolate_missing,
    predict_intent_from_prior,
    savgol_derivative,
)

__all__ = [
    "ThrowsenseError",
    "__version__",
    "build_prior",
    "butterworth_lowpass",
    "class_weights",
    "compute_metrics",
    "detect_throw_frame",
    "evaluate",
    "frontal_scores",
    "generate_dataset",
    "interpolate_missing",
    "predict_intent_from_prior",
    "savgol_derivative",
]
