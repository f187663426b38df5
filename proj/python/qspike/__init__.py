"""Hybrid spiking / variational-circuit image classifier."""

from ._core import (
    ArgumentError,
    Dataset,
    Error,
    FormatError,
    IndexError,
    IoError,
    Model,
    NumericError,
    ShapeError,
    StateError,
    StateVector,
    ValidationError,
    __version__,
    corrupt,
    create_model,
    cross_entropy,
    expected_rate,
    filter_classes,
    load_checkpoint,
    load_idx,
    metric_bundle,
    normalize_noise_spec,
    pooled_spike_rate,
    run_cli,
    save_checkpoint,
    vqc_forward,
    vqc_gradient,
    wilcoxon,
)
