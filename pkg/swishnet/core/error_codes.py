# swishnet/core/error_codes.py
"""
SwishNet Error Code Constants

Centralized definition of all error codes raised by the framework.
Using enums ensures consistency and prevents typos.
"""
from enum import Enum
from typing import Dict


class ErrorCode(str, Enum):
    """
    Enumeration of all SwishNet error codes.

    Organized by category for easier maintenance.
    """

    # Shape / state errors (programming errors inside a run)
    DIMENSION_MISMATCH = "DIMENSION_MISMATCH"
    RANK_MISMATCH = "RANK_MISMATCH"
    MISSING_FORWARD_CACHE = "MISSING_FORWARD_CACHE"
    STALE_FORWARD_CACHE = "STALE_FORWARD_CACHE"

    # Configuration errors
    INVALID_LAYER_GEOMETRY = "INVALID_LAYER_GEOMETRY"
    POOL_WINDOW_TOO_LARGE = "POOL_WINDOW_TOO_LARGE"
    INVALID_ARCHITECTURE = "INVALID_ARCHITECTURE"
    INVALID_HYPERPARAMETER = "INVALID_HYPERPARAMETER"

    # Validation errors (user input)
    INVALID_PARAMETER = "INVALID_PARAMETER"
    LABEL_OUT_OF_RANGE = "LABEL_OUT_OF_RANGE"
    UNKNOWN_ACTIVATION = "UNKNOWN_ACTIVATION"
    CLASS_COUNT_MISMATCH = "CLASS_COUNT_MISMATCH"
    MALFORMED_METRICS_FILE = "MALFORMED_METRICS_FILE"
    MISSING_INPUT_FILE = "MISSING_INPUT_FILE"

    # Data format errors
    BAD_MAGIC = "BAD_MAGIC"
    TRUNCATED_FILE = "TRUNCATED_FILE"
    BAD_RECORD_LENGTH = "BAD_RECORD_LENGTH"
    COUNT_MISMATCH = "COUNT_MISMATCH"

    # Training
    DIVERGENCE = "DIVERGENCE"


# Human-readable error messages with placeholders
ERROR_MESSAGES: Dict[ErrorCode, str] = {
    ErrorCode.DIMENSION_MISMATCH: "Shape mismatch in {operation}: {left} vs {right}",
    ErrorCode.RANK_MISMATCH: "{operation} expects rank {expected}, received shape {shape}",
    ErrorCode.MISSING_FORWARD_CACHE: "{layer}: backward called without a preceding forward",
    ErrorCode.STALE_FORWARD_CACHE: "{layer}: forward cache does not match the requested backward",
    ErrorCode.INVALID_LAYER_GEOMETRY: "{layer}: output extent ({extent}) is not a positive integer",
    ErrorCode.POOL_WINDOW_TOO_LARGE: "{layer}: pool window {window} larger than input {spatial}",
    ErrorCode.INVALID_ARCHITECTURE: "Unknown or invalid architecture '{arch}'",
    ErrorCode.INVALID_HYPERPARAMETER: "Invalid value for '{params}': {reason}",
    ErrorCode.INVALID_PARAMETER: "Invalid value for parameter '{params}': {reason}",
    ErrorCode.LABEL_OUT_OF_RANGE: "Label {value} outside [0, {class_count})",
    ErrorCode.UNKNOWN_ACTIVATION: "Unknown activation '{value}'. Valid names: {valid}",
    ErrorCode.CLASS_COUNT_MISMATCH: "Dataset has {dataset} classes but the model head has {model}",
    ErrorCode.MALFORMED_METRICS_FILE: "Malformed metrics file {path} at line {line}: {reason}",
    ErrorCode.MISSING_INPUT_FILE: "Input file not found: {path}",
    ErrorCode.BAD_MAGIC: "Unexpected magic number in {path}: observed {observed}, expected {expected}",
    ErrorCode.TRUNCATED_FILE: "Truncated file {path}: expected {expected} bytes, found {found}",
    ErrorCode.BAD_RECORD_LENGTH: "File {path} length {length} is not a multiple of the {record}-byte record",
    ErrorCode.COUNT_MISMATCH: "Image count {images} does not match label count {labels}",
    ErrorCode.DIVERGENCE: "Training diverged at epoch {epoch}: loss is {loss}",
}


def get_error_message(code: ErrorCode, **kwargs) -> str:
    """
    Get formatted error message for a given error code.

    Args:
        code: Error code enum value
        **kwargs: Values to format into the message template

    Returns:
        Formatted error message

    Example:
        >>> get_error_message(ErrorCode.LABEL_OUT_OF_RANGE, value=12, class_count=10)
        'Label 12 outside [0, 10)'
    """
    template = ERROR_MESSAGES.get(code, "An error occurred")
    try:
        return template.format(**kwargs)
    except KeyError:
        # If formatting fails, return template as-is
        return template
