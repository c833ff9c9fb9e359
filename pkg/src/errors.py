"""
Exception hierarchy for prnu_gate.

Every error carries a short machine-readable ``code`` which the CLI writes into
its error JSON and the service returns in HTTP error bodies.
"""

from typing import Optional, Tuple


class PrnuGateError(Exception):
    """Base class for all prnu_gate errors."""

    code = "error"

    def to_dict(self) -> dict:
        return {"error": self.code, "message": str(self)}


class FrameFormatError(PrnuGateError, ValueError):
    """Malformed Y4M stream, PGM file or sidecar manifest."""

    code = "frame_format"

    def __init__(self, message: str, offset: Optional[int] = None) -> None:
        if offset is not None:
            message = f"{message} (at byte offset {offset})"
        super().__init__(message)
        self.offset = offset


class EmptySequenceError(PrnuGateError, ValueError):
    code = "empty_sequence"


class DimensionMismatchError(PrnuGateError, ValueError):
    """Two frames or fingerprints that must share a size do not."""

    code = "dimension_mismatch"

    def __init__(
        self,
        message: str,
        expected: Optional[Tuple[int, int]] = None,
        actual: Optional[Tuple[int, int]] = None,
    ) -> None:
        if expected is not None and actual is not None:
            message = f"{message}: expected {expected[0]}x{expected[1]}, got {actual[0]}x{actual[1]}"
        super().__init__(message)
        self.expected = expected
        self.actual = actual


class FrameTooSmallError(PrnuGateError, ValueError):
    code = "frame_too_small"


class DegenerateInputError(PrnuGateError, ValueError):
    """Input for which correlation or PCE is undefined."""

    code = "degenerate_input"


class FingerprintFileError(PrnuGateError):
    code = "fingerprint_file"


class ChecksumError(FingerprintFileError):
    code = "checksum"


class StoreError(PrnuGateError):
    code = "store"


class DuplicateUserError(PrnuGateError):
    code = "duplicate_user"


class InsufficientFramesError(PrnuGateError):
    code = "insufficient_frames"


class InvalidTokenError(PrnuGateError):
    code = "invalid_token"


class ConfigError(PrnuGateError):
    code = "config"


class OutputError(PrnuGateError):
    """An output file or directory could not be written."""

    code = "output"


class ServiceError(PrnuGateError):
    """The service could not start (e.g. its port is taken)."""

    code = "service"


class RemoteError(PrnuGateError):
    """The admission service answered a request with an error status."""

    code = "remote"

    def __init__(self, message: str, status: int, remote_code: Optional[str] = None) -> None:
        super().__init__(message)
        self.status = status
        self.remote_code = remote_code

    def to_dict(self) -> dict:
        out = super().to_dict()
        out["status"] = self.status
        if self.remote_code:
            out["remote_error"] = self.remote_code
        return out
