"""
Error types and exit codes
"""

from typing import Any, Dict


class QpartError(Exception):
    """Base error for all qpart failures"""

    exit_code = 3

    def to_document(self) -> Dict[str, Any]:
        """Machine-readable error document"""
        return {
            "error": type(self).__name__,
            "message": str(self),
            "exit_code": self.exit_code,
        }


class InputError(QpartError, ValueError):
    """Invalid input file, argument or parameter"""

    exit_code = 1


class GraphFormatError(InputError):
    """Malformed METIS graph file"""


class PatternError(InputError):
    """Malformed or unsupported sparsity pattern"""


class ResourceCapError(QpartError):
    """Requested problem size exceeds a configured cap"""

    exit_code = 2

    def __init__(self, cap_name: str, cap: int, requested: int, what: str = "qubits"):
        self.cap_name = cap_name
        self.cap = cap
        self.requested = requested
        super().__init__(
            f"{what} requested ({requested}) exceeds {cap_name}={cap}"
        )


class InvariantViolation(QpartError):
    """Internal consistency check failed"""

    exit_code = 3
