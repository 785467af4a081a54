"""BiLSTM-CRF attribute extraction from product titles."""

from ._stagger import (
    BioTag,
    ConfigError,
    DataError,
    EpochRecord,
    Error,
    LabeledSequence,
    Model,
    ModelConfig,
    NumericError,
    TrainResult,
    __version__,
    cross_validate,
    decode_spans,
    encode_bio,
    evaluate,
    generate_synthetic,
    load_model,
    log_partition,
    log_sum_exp,
    make_transitions,
    nll_loss,
    path_score,
    read_conll,
    run_cli,
    selfcheck,
    tag_sequence_no_crf,
    tokenize,
    train,
    viterbi,
    write_conll,
)

__all__ = [
    "BioTag",
    "ConfigError",
    "DataError",
    "EpochRecord",
    "Error",
    "LabeledSequence",
    "Model",
    "ModelConfig",
    "NumericError",
    "TrainResult",
    "__version__",
    "cross_validate",
    "decode_spans",
    "encode_bio",
    "evaluate",
    "generate_synthetic",
    "load_model",
    "log_partition",
    "log_sum_exp",
    "make_transitions",
    "nll_loss",
    "path_score",
    "read_conll",
    "run_cli",
    "selfcheck",
    "tag_sequence_no_crf",
    "tokenize",
    "train",
    "viterbi",
    "write_conll",
]
