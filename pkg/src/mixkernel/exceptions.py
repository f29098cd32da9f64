"""Exception types raised by mixkernel validation."""


class MixKernelError(ValueError):
    """Base class for all mixkernel validation errors."""


class GridMismatchError(MixKernelError):
    """Curves sampled on different grids were combined."""


class TooFewSamplesError(MixKernelError):
    """An operation needs more samples than the input provides."""


class CardinalityMismatchError(MixKernelError):
    """Categorical values with different cardinalities were compared."""


class LengthMismatchError(MixKernelError):
    """Vector arguments disagree in length."""


class SchemaMismatchError(MixKernelError):
    """A sample does not conform to the dataset schema."""


class ResponseKindError(MixKernelError):
    """A regression operation received class responses, or vice versa."""


class EmptyDatasetError(MixKernelError):
    """The dataset contains no samples."""


class InvalidModeError(MixKernelError):
    """Weight-selection mode or its parameters are invalid."""


class InsufficientDataError(MixKernelError):
    """Not enough aggregate data to compute a diagnostic."""
