"""Unsupervised discovery of latent acoustic domains."""

from ._core import (
    Codebook,
    Error,
    FeatureCorpus,
    InputError,
    IoError,
    LdaModel,
    LdaTrainResult,
    NumericalError,
    QuantizedCorpus,
    assign_domains,
    distortion,
    infer,
    kl_divergence,
    quantize_corpus,
    quantize_frame,
    read_codebook,
    read_features,
    read_model,
    read_quantized,
    run_cli,
    smooth,
    split,
    synthesize_gaussian,
    train_codebook,
    train_lda,
    write_codebook,
    write_features,
    write_model,
    write_quantized,
)

__version__ = "0.1.0"
