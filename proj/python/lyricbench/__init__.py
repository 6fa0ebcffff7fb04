"""Automated lyric annotation benchmark."""

from ._core import (
    Error,
    FormatError,
    InvalidArgument,
    StageError,
    TfIdfIndex,
    bleu,
    combine_ibleu,
    config_keys,
    fleiss_kappa,
    generate_synthetic,
    ibleu,
    load_corpus,
    meteor,
    pearson,
    regenerate_report,
    run_pipeline,
    sari,
    split_sentences,
    stem,
    tokenize,
    train_model1,
)

__all__ = [
    "Error",
    "FormatError",
    "InvalidArgument",
    "StageError",
    "TfIdfIndex",
    "bleu",
    "combine_ibleu",
    "config_keys",
    "fleiss_kappa",
    "generate_synthetic",
    "ibleu",
    "load_corpus",
    "meteor",
    "pearson",
    "regenerate_report",
    "run_pipeline",
    "sari",
    "split_sentences",
    "stem",
    "tokenize",
    "train_model1",
]
