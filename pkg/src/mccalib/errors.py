"""Exception hierarchy shared by all mccalib modules."""


class MccalibError(Exception):
    """Base class for all mccalib errors."""


class DataFileError(MccalibError):
    """Input file is missing or cannot be parsed at all."""


class SchemaError(MccalibError):
    """The declared label column does not exist in the input."""


class EmptyDatasetError(MccalibError):
    """No usable rows remain after dropping bad ones."""


class UnknownClassError(MccalibError):
    """A merge group names a class that is not in the dataset."""


class OverlappingGroupsError(MccalibError):
    """Two merge groups share a class name."""


class TooFewSamplesError(MccalibError):
    """Not enough samples for the requested operation."""


class TooFewClassesError(MccalibError):
    """Binary decomposition needs at least two classes."""


class DegenerateInputError(MccalibError):
    """Classifier training input is empty or misses a class."""


class DimensionMismatchError(MccalibError):
    """Prediction input width differs from the training width."""


class DegenerateTaskError(MccalibError):
    """A binary task contains samples of only one class."""


class InsufficientDataError(MccalibError):
    """A resampling split would leave a class side empty."""


class EmptyPoolError(MccalibError):
    """Calibration fitting got an empty point pool."""


class ScoreOutOfRangeError(MccalibError):
    """A score passed to a calibration map lies outside [0, 1]."""


class InvalidEstimatesError(MccalibError):
    """Pairwise estimate matrix violates its invariants."""


class ShapeMismatchError(MccalibError):
    """Metric inputs have incompatible shapes."""


class UnsupportedFormatError(MccalibError):
    """Unknown table output format."""


class HarnessError(MccalibError):
    """A module error, annotated with the fold/task where it occurred."""
