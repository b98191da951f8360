"""UAV air-to-ground jamming dataset synthesis and STL-based detection.

Pipeline: synthesize labeled per-bin received-power resource blocks over
a Rician air-to-ground channel (`channel`, `dataset`), decompose
normalized three-block samples with seasonal-trend loess decomposition
(`loess`, `stl`), reduce each sample to a reconstruction-error feature
(`features`), fit small one-dimensional detectors (`classify`), and
score them per scenario and across the jammer-distance x power grid
(`evaluate`).  `cli` exposes the whole flow as subcommands.
"""

__version__ = "0.1.0"

from .channel import (
    CALIBRATED_CHANNEL,
    BlockLabel,
    ChannelParams,
    JammerConfig,
    ResourceBlock,
    ScenarioConfig,
    synthesize_block,
)
from .classify import (
    ClassifierModel,
    FITTERS,
    fit_linear_svm,
    fit_logistic,
    fit_threshold,
    load_model,
    predict,
    save_model,
)
from .dataset import (
    DatasetSpec,
    FULL_SCALE_TOTAL_BLOCKS,
    class_counts,
    export_csv,
    generate_dataset,
    mean_power_difference,
    read_dataset,
    read_sidecar,
    write_dataset,
)
from .errors import (
    ConfigError,
    DataFormatError,
    DegenerateSampleError,
    DomainError,
)
from .evaluate import (
    EvalReport,
    SweepResult,
    evaluate,
    spearman_rho,
    split_by_scenario,
    sweep_accuracy,
)
from .features import (
    FeatureRow,
    TripleSample,
    extract_features,
    make_triples,
    normalize,
    read_features_csv,
    write_features_csv,
)
from .loess import LoessParams, loess_smooth
from .stl import StlDecomposition, StlParams, reconstruction_rmse, stl_decompose

__all__ = [
    "__version__",
    "BlockLabel", "ChannelParams", "JammerConfig", "ResourceBlock",
    "ScenarioConfig", "CALIBRATED_CHANNEL", "synthesize_block",
    "ClassifierModel", "FITTERS", "fit_linear_svm", "fit_logistic",
    "fit_threshold", "load_model", "predict", "save_model",
    "DatasetSpec", "FULL_SCALE_TOTAL_BLOCKS", "class_counts", "export_csv",
    "generate_dataset", "mean_power_difference", "read_dataset",
    "read_sidecar", "write_dataset",
    "ConfigError", "DataFormatError", "DegenerateSampleError", "DomainError",
    "EvalReport", "SweepResult", "evaluate", "spearman_rho",
    "split_by_scenario", "sweep_accuracy",
    "FeatureRow", "TripleSample", "extract_features", "make_triples",
    "normalize", "read_features_csv", "write_features_csv",
    "LoessParams", "loess_smooth",
    "StlDecomposition", "StlParams", "reconstruction_rmse", "stl_decompose",
]
