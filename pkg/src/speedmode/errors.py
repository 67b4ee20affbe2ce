"""Exception types shared across the package."""


class SpeedmodeError(Exception):
    """Base class for errors raised by this package."""


class EmptyTripError(SpeedmodeError):
    """A trip has too few points for the requested computation."""


class FormatError(SpeedmodeError):
    """An input file does not match its declared schema."""


class CheckpointError(SpeedmodeError):
    """A checkpoint file is missing, truncated, or of the wrong version."""


class NonFiniteError(SpeedmodeError):
    """A numeric operation produced NaN or Inf."""


class TrainingDivergedError(SpeedmodeError):
    """Training hit a non-finite loss or gradient."""
