"""Python bindings for the ribbon proprioception core."""

from ._ribbon import (
    Model,
    RibbonError,
    Trial,
    butterworth2,
    calibrate,
    classify,
    curvature,
    decision_map,
    filtfilt,
    score_regions,
    synth_timing,
    synth_trials,
    train,
)

__all__ = [
    "Model",
    "RibbonError",
    "Trial",
    "butterworth2",
    "calibrate",
    "classify",
    "curvature",
    "decision_map",
    "filtfilt",
    "score_regions",
    "synth_timing",
    "synth_trials",
    "train",
]
