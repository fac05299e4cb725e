"""Exception hierarchy shared across the package.

Every error raised by fusedetect derives from FusedetectError so callers can
catch the whole family with one clause; the CLI maps subfamilies to exit codes.
"""


class FusedetectError(Exception):
    """Base class for all fusedetect errors."""


# -- imaging ---------------------------------------------------------------

class IoError(FusedetectError):
    """File could not be read (missing, unreadable)."""


class DecodeError(FusedetectError):
    """File is not a decodable PNG/JPEG/BMP image."""


class TooSmallError(FusedetectError):
    """Image or plane is below the minimum size for the requested operation."""


# -- feature extraction ----------------------------------------------------

class DegenerateGlcmError(FusedetectError):
    """No valid pixel pairs exist for the requested co-occurrence geometry."""


class EmptyHistogramError(FusedetectError):
    """Histogram statistics requested on a histogram with zero total count."""


# -- embeddings ------------------------------------------------------------

class ProviderInitError(FusedetectError):
    """Embedding backend could not be initialised."""


class InferenceError(FusedetectError):
    """Embedding backend failed while producing a vector."""


class EmbeddingMissError(FusedetectError):
    """Requested key(s) absent from the embedding store."""


class DimMismatchError(FusedetectError):
    """Vector length differs from the expected dimension."""


class ParseError(FusedetectError):
    """Malformed serialized data (store line, model file, report file)."""


class DuplicateKeyError(FusedetectError):
    """The same key appears more than once where keys must be unique."""


# -- fusion ----------------------------------------------------------------

class InsufficientDataError(FusedetectError):
    """Too few samples to estimate the requested statistics."""


class UnknownFamilyError(FusedetectError):
    """Feature family not present in the standardization statistics."""


class FusionOrderError(FusedetectError):
    """Feature families missing, duplicated, or out of canonical order."""


class StatsMismatchError(FusedetectError):
    """Inputs were standardized with different statistics objects."""


# -- classifiers -----------------------------------------------------------

class SingleClassError(FusedetectError):
    """Training data contains only one class."""


class InvalidFeatureError(FusedetectError):
    """Training data contains NaN or infinite feature values."""


class VersionError(FusedetectError):
    """Serialized file carries an unsupported format version."""


# -- metrics ---------------------------------------------------------------

class LengthError(FusedetectError):
    """Paired sequences have different lengths."""


class EmptyError(FusedetectError):
    """Operation requires at least one element."""


# -- analysis --------------------------------------------------------------

class DimError(FusedetectError):
    """Requested dimension exceeds what the data supports."""


class SingleClusterError(FusedetectError):
    """Silhouette requires exactly two distinct cluster labels."""


class ConstantInputError(FusedetectError):
    """Rank correlation is undefined for a constant sequence."""


class GroupCountError(FusedetectError):
    """Statistical test requires at least two groups / factor levels."""


class RangeError(FusedetectError):
    """Value outside its permitted range (e.g. p-value outside [0, 1])."""


class NumericalError(FusedetectError):
    """A numerical routine failed to produce a usable result."""


# -- harness ---------------------------------------------------------------

class SchemaError(FusedetectError):
    """Manifest file is missing required columns."""


class DuplicateError(FusedetectError):
    """Duplicate image path in a manifest."""


class LabelError(FusedetectError):
    """Manifest row carries an unknown class label."""


class StratumError(FusedetectError):
    """A (label, generator) stratum is too small to split."""


class CacheMissError(FusedetectError):
    """Required feature-cache entries are absent."""


class GeneratorCountError(FusedetectError):
    """Protocol requires at least two distinct generators."""
