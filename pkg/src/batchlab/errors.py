"""Exception hierarchy shared by every batchlab module."""

from __future__ import annotations


class BatchLabError(Exception):
    """Base class for all errors raised by batchlab."""


class FieldError(BatchLabError, ValueError):
    """Invalid field modulus, foreign operands, or division by zero."""


class CodeError(BatchLabError, ValueError):
    """A generator matrix or code-level precondition was rejected."""


class RecoveryError(BatchLabError, ValueError):
    """A claimed recovery function does not reproduce its target symbol."""


class NotBatchError(BatchLabError):
    """The code cannot serve a request that a computation depends on."""

    def __init__(self, message: str, request: tuple[int, ...] | None = None):
        super().__init__(message)
        self.request = request


class CapExceeded(BatchLabError):
    """An enumeration would exceed its configured size cap."""


class CertificateError(BatchLabError):
    """Internal inconsistency detected while building a certificate."""


class ParseError(BatchLabError, ValueError):
    """Malformed input file; carries the 1-based line and column."""

    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column
