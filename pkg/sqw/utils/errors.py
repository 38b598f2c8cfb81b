"""
Exception hierarchy. Every error the CLI can surface carries the exit code it maps to.
"""
from sqw.consts import ExitCode


class SQWError(Exception):
    exit_code: int = 1


class ConfigError(SQWError):
    exit_code = ExitCode.CONFIG

    def __init__(self, message: str, diagnostics: list[str] | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or []

    @classmethod
    def from_validation(cls, exc, source: str = "config") -> "ConfigError":
        """Build from a pydantic ValidationError, keeping dotted field paths."""
        lines = []
        for err in exc.errors():
            path = ".".join(str(part) for part in err.get("loc", ())) or "<root>"
            lines.append(f"{path}: {err.get('msg', 'invalid value')}")
        return cls(f"{source} failed validation ({len(lines)} error(s))", lines)


class NumericalGuardError(SQWError, ValueError):
    exit_code = ExitCode.NUMERICAL


class GridCaptureError(NumericalGuardError):
    pass


class AliasingError(NumericalGuardError):
    pass


class KernelSingularityError(NumericalGuardError):
    pass


class GridSizeError(NumericalGuardError):
    pass


class GridExitError(NumericalGuardError):
    pass


class OverlapError(NumericalGuardError):
    pass


class SpectralTailError(NumericalGuardError):
    pass


class QuadratureError(NumericalGuardError):
    pass


class NormalizationError(NumericalGuardError):
    pass


class PureModeError(NumericalGuardError):
    pass


class NoDominantPeakError(NumericalGuardError):
    pass


class SnapshotError(SQWError, OSError):
    exit_code = ExitCode.IO
    code: str = "io"


class BadMagicError(SnapshotError):
    code = "magic"


class TruncatedSnapshotError(SnapshotError):
    code = "truncated"


class SnapshotMetadataError(SnapshotError):
    code = "metadata"


class UnsupportedEndiannessError(SnapshotError):
    code = "endianness"


class DimensionMismatchError(SnapshotError):
    code = "dimensions"


class OutputError(SQWError, OSError):
    exit_code = ExitCode.IO


__all__ = [
    "SQWError",
    "ConfigError",
    "NumericalGuardError",
    "GridCaptureError",
    "AliasingError",
    "KernelSingularityError",
    "GridSizeError",
    "GridExitError",
    "OverlapError",
    "SpectralTailError",
    "QuadratureError",
    "NormalizationError",
    "PureModeError",
    "NoDominantPeakError",
    "SnapshotError",
    "BadMagicError",
    "TruncatedSnapshotError",
    "SnapshotMetadataError",
    "UnsupportedEndiannessError",
    "DimensionMismatchError",
    "OutputError",
]
