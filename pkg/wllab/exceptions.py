"""
wllab Exceptions - Custom Exception Classes
Specific exceptions for the different failure modes of the refinement library
"""


class WllabError(Exception):
    """Base exception for all wllab errors"""

    def __init__(self, message: str, details: dict = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}

    def __str__(self):
        if self.details:
            detail_str = ", ".join(f"{k}={v}" for k, v in self.details.items())
            return f"{self.message} ({detail_str})"
        return self.message


class ValidationError(WllabError):
    """Raised when an argument is outside the domain of an operation"""

    def __init__(self, message: str, field: str = None, value=None):
        details = {}
        if field:
            details['field'] = field
        if value is not None:
            details['value'] = str(value)
        super().__init__(message, details)


class ShapeMismatchError(WllabError):
    """Raised when two partitions or matrices do not share a shape"""

    def __init__(self, message: str, left=None, right=None):
        details = {}
        if left is not None:
            details['left'] = str(left)
        if right is not None:
            details['right'] = str(right)
        super().__init__(message, details)


class CapExceededError(WllabError):
    """Raised when a computation would exceed a configured size cap"""

    def __init__(self, message: str, cap_name: str = None, cap: int = None, requested: int = None):
        details = {}
        if cap_name:
            details['cap_name'] = cap_name
        if cap is not None:
            details['cap'] = cap
        if requested is not None:
            details['requested'] = requested
        super().__init__(message, details)


class SimilarityUndecidedError(WllabError):
    """Raised when simultaneous similarity cannot be decided within the search cap"""

    def __init__(self, message: str, field: str = None, dimension: int = None, cap: int = None):
        details = {}
        if field:
            details['field'] = field
        if dimension is not None:
            details['dimension'] = dimension
        if cap is not None:
            details['cap'] = cap
        super().__init__(message, details)


class NotRainbowError(WllabError):
    """Raised when an arc partition violates the rainbow conditions"""

    def __init__(self, message: str, condition: str = None, witness=None):
        details = {}
        if condition:
            details['condition'] = condition
        if witness is not None:
            details['witness'] = str(witness)
        super().__init__(message, details)


class NotGraphLikeError(WllabError):
    """Raised when an operation requires a graph-like partition"""

    def __init__(self, message: str, violation: str = None):
        details = {}
        if violation:
            details['violation'] = violation
        super().__init__(message, details)


class ClosureViolationError(WllabError):
    """Raised when a matrix set does not span a coherent algebra"""

    def __init__(self, message: str, condition: str = None):
        details = {}
        if condition:
            details['condition'] = condition
        super().__init__(message, details)


class ParseError(WllabError):
    """Raised when a graph, partition or manifest document cannot be decoded"""

    def __init__(self, message: str, filename: str = None, reason: str = None):
        details = {}
        if filename:
            details['filename'] = filename
        if reason:
            details['reason'] = reason
        super().__init__(message, details)


class ConfigurationError(WllabError):
    """Raised when configuration is invalid"""

    def __init__(self, message: str, config_key: str = None, config_value: str = None):
        details = {}
        if config_key:
            details['config_key'] = config_key
        if config_value:
            details['config_value'] = str(config_value)
        super().__init__(message, details)
