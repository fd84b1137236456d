"""Exception hierarchy shared across the pipeline.

Three broad categories map onto CLI exit codes: ConfigError -> 2,
DataError -> 3, NumericError -> 4.
"""


class PipelineError(Exception):
    """Base class for every pipeline-specific failure."""


class ConfigError(PipelineError):
    """A parameter or configuration value is outside its contract."""


class DataError(PipelineError):
    """Input data violates a precondition."""


class NumericError(PipelineError):
    """A numeric invariant was violated during computation."""


# --- imaging ---------------------------------------------------------------

class UnsupportedFormatError(DataError):
    """File is not 8-bit grayscale PNG or PGM (P5)."""


class CorruptImageError(DataError):
    """File claims a supported format but cannot be decoded."""


class CorruptFileError(DataError):
    """A manifest, feature CSV, or model file is malformed."""


class InvalidLevelCountError(ConfigError):
    """Quantization level count outside [2, 256]."""


class DimensionMismatchError(DataError):
    """Paired arrays (image/mask, model/input) disagree on shape."""


class PatchTooLargeError(ConfigError):
    """Requested patch size exceeds the image extent."""


class MixedPatchSizesError(DataError):
    """A patch collection mixes different patch sizes."""


class EmptyInputError(DataError):
    """An operation received an empty collection."""


# --- features --------------------------------------------------------------

class LevelOverflowError(DataError):
    """A pixel value is >= the declared gray-level count."""


class UnnormalizedMatrixError(NumericError):
    """Co-occurrence statistics require a probability-normalized matrix."""


class OddDimensionsError(DataError):
    """The wavelet transform needs even height and width."""


class UnknownExtractorError(ConfigError):
    """Extractor tag not one of RAW/GLCM/LDP/GLRLM/GLSZM/DWT."""


class EmptyMatrixError(DataError):
    """Run-length or size-zone matrix contains no entries."""


class NonFiniteFeatureError(NumericError):
    """A feature value is NaN or infinite."""


# --- classifier ------------------------------------------------------------

class TooFewRowsError(DataError):
    """Standardizer needs at least two rows."""


class SingleClassInputError(DataError):
    """Training data must contain both classes."""


class EmptyEnsembleError(DataError):
    """Ensemble prediction needs at least one member model."""


class ModelMismatchError(DataError):
    """Model dimension or kernel disagrees with the input it is applied to."""


# --- evaluation ------------------------------------------------------------

class LengthMismatchError(DataError):
    """y_true and y_pred differ in length."""


class EmptyCountsError(DataError):
    """Metrics need at least one evaluated sample."""


class ClassTooSmallError(DataError):
    """A class has fewer samples than the number of folds."""


# --- experiment ------------------------------------------------------------

class EmptyReportError(DataError):
    """Report rendering needs at least one row."""


class ExperimentCellError(PipelineError):
    """A (subset, extractor, k) cell of the experiment grid failed."""

    def __init__(self, subset: str, extractor: str, k: int, cause: Exception):
        self.cell = (subset, extractor, k)
        self.cause = cause
        super().__init__(f"cell {subset}/{extractor}/{k}-fold failed: {cause}")
