# swishnet/core/exceptions.py
"""
SwishNet Exception Classes

Every failure raised by the framework derives from SwishNetError, which
carries a machine-readable error code and the process exit code the CLI
reports for it.
"""
from typing import Any, Dict, List, Optional, Sequence

from .error_codes import ErrorCode, get_error_message

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_DIVERGED = 3


class SwishNetError(Exception):
    """
    Base exception for all SwishNet errors.

    Provides consistent error structure across the framework and the CLI.
    """

    def __init__(
        self,
        message: str,
        error_type: str,
        error_code: ErrorCode | str,
        exit_code: int = EXIT_USAGE,
        detail: Optional[str] = None,
        metadata: Optional[Dict[str, Any]] = None,
    ):
        """
        Initialize SwishNet Error.

        Args:
            message: Human-readable error message
            error_type: Category of error (dimension_error, data_format_error, etc.)
            error_code: Machine-readable error code (ErrorCode enum or string)
            exit_code: Process exit status when the error reaches the CLI
            detail: Extended explanation of the error
            metadata: Additional context-specific information
        """
        self.message = message
        self.error_type = error_type
        # Convert enum to string value
        self.error_code = error_code.value if isinstance(error_code, ErrorCode) else error_code
        self.exit_code = exit_code
        self.detail = detail
        self.metadata = metadata or {}
        super().__init__(self.message)

    def to_dict(self) -> Dict[str, Any]:
        """Convert exception to a serialisable report."""
        error_dict: Dict[str, Any] = {
            "type": self.error_type,
            "code": self.error_code,
            "message": self.message,
            "exit_code": self.exit_code,
        }
        if self.detail:
            error_dict["detail"] = self.detail
        if self.metadata:
            error_dict["metadata"] = self.metadata
        return {"error": error_dict}


class DimensionError(SwishNetError):
    """Raised when tensor shapes do not conform."""

    def __init__(self, message: str, error_code: ErrorCode = ErrorCode.DIMENSION_MISMATCH, **kwargs):
        super().__init__(message=message, error_type="dimension_error", error_code=error_code, **kwargs)


class StateError(SwishNetError):
    """Raised when a layer's backward pass has no valid forward cache."""

    def __init__(self, message: str, error_code: ErrorCode = ErrorCode.MISSING_FORWARD_CACHE, **kwargs):
        super().__init__(message=message, error_type="state_error", error_code=error_code, **kwargs)


class ConfigurationError(SwishNetError):
    """Raised when layer geometry, architecture or hyperparameters are invalid."""

    def __init__(self, message: str, error_code: ErrorCode = ErrorCode.INVALID_LAYER_GEOMETRY, **kwargs):
        super().__init__(message=message, error_type="configuration_error", error_code=error_code, **kwargs)


class ValidationError(SwishNetError):
    """Raised when user-supplied values fail validation."""

    def __init__(
        self,
        message: str,
        error_code: ErrorCode = ErrorCode.INVALID_PARAMETER,
        params: Optional[str | List[str]] = None,
        **kwargs,
    ):
        self.params = params
        super().__init__(message=message, error_type="validation_error", error_code=error_code, **kwargs)


class DataFormatError(SwishNetError):
    """Raised when a dataset file does not follow its binary layout."""

    def __init__(self, message: str, error_code: ErrorCode = ErrorCode.BAD_MAGIC, **kwargs):
        super().__init__(message=message, error_type="data_format_error", error_code=error_code, **kwargs)


class ConsistencyError(SwishNetError):
    """Raised when paired dataset files disagree with each other."""

    def __init__(self, message: str, error_code: ErrorCode = ErrorCode.COUNT_MISMATCH, **kwargs):
        super().__init__(message=message, error_type="consistency_error", error_code=error_code, **kwargs)


class DivergenceError(SwishNetError):
    """Raised when a training loss becomes NaN or infinite."""

    def __init__(self, epoch: int, loss: float, partial_metrics: Optional[Sequence[Any]] = None):
        self.epoch = epoch
        self.loss = loss
        self.partial_metrics = list(partial_metrics or [])
        super().__init__(
            message=get_error_message(ErrorCode.DIVERGENCE, epoch=epoch, loss=loss),
            error_type="divergence",
            error_code=ErrorCode.DIVERGENCE,
            exit_code=EXIT_DIVERGED,
            metadata={"epoch": epoch, "loss": str(loss)},
        )


# Convenience functions for common errors


def dimension_mismatch(operation: str, left: Sequence[int], right: Sequence[int]) -> DimensionError:
    """Create a dimension error naming both shapes."""
    return DimensionError(
        message=get_error_message(
            ErrorCode.DIMENSION_MISMATCH, operation=operation, left=list(left), right=list(right)
        ),
        metadata={"operation": operation, "left": list(left), "right": list(right)},
    )


def rank_mismatch(operation: str, expected: int, shape: Sequence[int]) -> DimensionError:
    """Create a dimension error for a tensor of the wrong rank."""
    return DimensionError(
        message=get_error_message(ErrorCode.RANK_MISMATCH, operation=operation, expected=expected, shape=list(shape)),
        error_code=ErrorCode.RANK_MISMATCH,
        metadata={"operation": operation, "shape": list(shape)},
    )


def missing_cache(layer: str) -> StateError:
    """Create a state error for a backward pass without forward cache."""
    return StateError(message=get_error_message(ErrorCode.MISSING_FORWARD_CACHE, layer=layer))


def stale_cache(layer: str, detail: str) -> StateError:
    """Create a state error for a forward cache that no longer matches."""
    return StateError(
        message=get_error_message(ErrorCode.STALE_FORWARD_CACHE, layer=layer),
        error_code=ErrorCode.STALE_FORWARD_CACHE,
        detail=detail,
    )


def unknown_activation(value: str, valid: Sequence[str]) -> ValidationError:
    """Create an error for an activation name outside the supported set."""
    return ValidationError(
        message=get_error_message(ErrorCode.UNKNOWN_ACTIVATION, value=value, valid=", ".join(valid)),
        error_code=ErrorCode.UNKNOWN_ACTIVATION,
        params="activation",
        metadata={"valid": list(valid)},
    )


def label_out_of_range(value: int, class_count: int) -> ValidationError:
    """Create an error for a class label outside the head width."""
    return ValidationError(
        message=get_error_message(ErrorCode.LABEL_OUT_OF_RANGE, value=value, class_count=class_count),
        error_code=ErrorCode.LABEL_OUT_OF_RANGE,
        params="labels",
    )


def invalid_hyperparameter(params: str, reason: str) -> ConfigurationError:
    """Create an error for an out-of-range hyperparameter."""
    return ConfigurationError(
        message=get_error_message(ErrorCode.INVALID_HYPERPARAMETER, params=params, reason=reason),
        error_code=ErrorCode.INVALID_HYPERPARAMETER,
    )


def invalid_parameter(params: str, reason: str) -> ValidationError:
    """Create an error for an invalid user-supplied value."""
    return ValidationError(
        message=get_error_message(ErrorCode.INVALID_PARAMETER, params=params, reason=reason),
        error_code=ErrorCode.INVALID_PARAMETER,
        params=params,
    )
