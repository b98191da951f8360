"""Convolutional-recurrent jamming classifier for spectrum-block datasets.

Consumes the binary/CSV dataset formats written by the ``uavjam`` generator
(through their documented on-disk layout only) and classifies each
1024-bin spectrum block into one of four channel/interference classes
with a strided-CNN + LSTM network trained by validation-checkpoint stages.
"""

from .data import (
    CLASS_NAMES,
    NUM_CLASSES,
    DatasetFormatError,
    kfold_indices,
    load_binary,
    load_csv,
    load_dataset,
    normalize_minmax,
    split_train_test,
)
from .evaluate import (
    EvalResult,
    confusion_matrix,
    ensemble_probabilities,
    evaluate_ensemble,
    summarize,
    write_confusion_csv,
    write_report_json,
)
from .model import (
    PARAM_WINDOW,
    CnnLstmSpec,
    ConvStage,
    ModelConfigError,
    build_model,
    prepare_inputs,
    trainable_parameter_count,
)
from .train import (
    FoldResult,
    TrainSchedule,
    make_optimizer,
    next_action,
    seed_everything,
    staged_train,
    train_fold,
)

__version__ = "0.1.0"

__all__ = [
    "CLASS_NAMES",
    "NUM_CLASSES",
    "DatasetFormatError",
    "kfold_indices",
    "load_binary",
    "load_csv",
    "load_dataset",
    "normalize_minmax",
    "split_train_test",
    "EvalResult",
    "confusion_matrix",
    "ensemble_probabilities",
    "evaluate_ensemble",
    "summarize",
    "write_confusion_csv",
    "write_report_json",
    "PARAM_WINDOW",
    "CnnLstmSpec",
    "ConvStage",
    "ModelConfigError",
    "build_model",
    "prepare_inputs",
    "trainable_parameter_count",
    "FoldResult",
    "TrainSchedule",
    "make_optimizer",
    "next_action",
    "seed_everything",
    "staged_train",
    "train_fold",
    "__version__",
]
