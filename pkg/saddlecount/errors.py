"""
Errors raised by saddlecount. Every error carries the process exit code the
CLI should use and a human readable detail, so the CLI can turn any of them
into a machine-readable record without inspecting the type.
"""
from typing import Any


class SaddleCountError(Exception):
    exit_code: int = 3

    def __init__(self, detail: str, exit_code: int | None = None):
        super().__init__(detail)
        self.detail = detail
        if exit_code is not None:
            self.exit_code = exit_code

    def to_record(self) -> dict[str, Any]:
        return {
            "error": type(self).__name__,
            "detail": self.detail,
            "exit_code": self.exit_code,
        }


# --- Config errors (exit 2) ---
class ConfigError(SaddleCountError):
    exit_code = 2


class MalformedSpec(ConfigError):
    pass


class NonMatchingEdge(ConfigError):
    pass


class DisconnectedSurface(ConfigError):
    pass


class UnknownSingularity(ConfigError):
    pass


class InvalidParameter(ConfigError):
    pass


# --- Computation errors (exit 3) ---
class ComputationError(SaddleCountError):
    exit_code = 3


class RadiusExceedsEnumeration(ComputationError):
    pass


class SupportExceedsEnumeration(ComputationError):
    pass


class ToleranceBreakdown(ComputationError):
    pass


class InsufficientData(ComputationError):
    pass


class ZeroMassPsi(ComputationError):
    pass


class EmptySample(ComputationError):
    pass


class ScheduleViolation(ComputationError):
    pass
