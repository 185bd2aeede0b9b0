"""Domain error types.

Every error is a ``ValueError`` so callers that only catch ``ValueError`` keep
working; ``AispError`` lets the CLI tell domain failures from programming errors.
"""

from typing import Optional


class AispError(ValueError):
    """Base class for all domain errors."""


class ShapeError(AispError):
    """Tensor or mask dimensions do not agree."""


class ParameterError(AispError):
    """An operation parameter is out of its admissible range."""


class EvaluationError(AispError):
    """A function produced a non-finite value."""


class EmptyMaskError(AispError):
    """Segmentation produced no foreground pixel for the instance."""


class InvalidDepthError(AispError):
    """Depth sample is missing, non-positive or non-finite."""


class BehindCameraError(AispError):
    """Point lies on or behind the image plane."""


class RotationError(AispError):
    """Rotation matrix is not a proper orthonormal matrix."""


class RangeError(AispError):
    """Argument outside its allowed interval (time, crop window, ...)."""


class ConsistencyError(AispError):
    """Inputs contradict each other (dangling references, visible > amodal)."""


class UndefinedLevelError(AispError):
    """Harvest ratio requested for a level with no trials."""


class DegenerateInputError(AispError):
    """Regression input without variance."""


class GenerationError(AispError):
    """Synthetic scene could not be generated within the retry budget."""


class AnnotationParseError(AispError):
    """Annotation document is malformed."""

    def __init__(self, message: str, location: Optional[str] = None):
        self.location = location
        if location:
            message = f"{location}: {message}"
        super().__init__(message)
