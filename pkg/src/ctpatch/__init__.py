"""Texture-feature extraction and SVM classification for labeled CT patches."""

from ._version import __version__  # noqa: F401

from .imaging import (  # noqa: F401
    CORONAVIRUS,
    NON_CORONAVIRUS,
    GrayImage,
    LabelMask,
    Patch,
    SubsetManifest,
    extract_patches,
    load_gray_image,
    load_label_mask,
    load_patches,
    quantize,
    read_manifest,
    write_manifest,
)
from .features import (  # noqa: F401
    EXTRACTORS,
    FeatureConfig,
    FeatureVector,
    expected_length,
    extract,
)
from .svm import (  # noqa: F401
    EnsembleModel,
    SvmModel,
    SvmParams,
    Standardizer,
    ensemble_predict,
    fit_standardizer,
    predict,
    train_svm,
)
from .evaluation import (  # noqa: F401
    ConfusionCounts,
    CvSummary,
    FoldPlan,
    MetricSet,
    confusion,
    cross_validate,
    make_folds,
    metrics,
)
from .experiment import (  # noqa: F401
    ExperimentConfig,
    classify_image,
    run_experiment,
)
from .reporting import ExperimentReport, ReportRow, render  # noqa: F401
