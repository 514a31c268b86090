"""Exception hierarchy shared by the toolkit and mapped to CLI exit codes"""

EXIT_OK = 0
EXIT_DETECTED = 10
EXIT_INPUT_ERROR = 2
EXIT_CONSISTENCY_ERROR = 3


class InterferenceToolkitError(Exception):
    """Base class for all toolkit errors"""

    exit_code = EXIT_INPUT_ERROR


class InvalidInputError(InterferenceToolkitError, ValueError):
    """Precondition violated by caller-supplied data or parameters"""


class MalformedIqFileError(InvalidInputError):
    """Raw IQ file is not a whole number of cf32le records"""


class MissingMetadataError(InvalidInputError):
    """IQ sidecar metadata is missing or invalid"""


class ArtifactNotFoundError(InvalidInputError):
    """A required model or calibration artifact does not exist"""


class DegenerateDistributionError(InterferenceToolkitError, ValueError):
    """Higher moments requested of a zero-variance sample"""

    exit_code = EXIT_CONSISTENCY_ERROR


class TrainingDivergedError(InterferenceToolkitError, ArithmeticError):
    """Non-finite loss or activation encountered"""

    exit_code = EXIT_CONSISTENCY_ERROR


class LabelMismatchError(InterferenceToolkitError, ValueError):
    """Class labels are unknown to the model or absent from the data"""

    exit_code = EXIT_CONSISTENCY_ERROR
