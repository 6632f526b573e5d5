"""Shared error types. CLI exit-code mapping lives in cli.py."""

from __future__ import annotations


class LodanaError(Exception):
    """Base class for all errors raised by this package."""


class InputError(LodanaError):
    """Malformed or inconsistent user input (files, arguments, schemas)."""


class PhaseError(LodanaError):
    """An operation was attempted in the wrong session phase."""


class DecisionError(LodanaError):
    """A decision referenced something that is not a presented candidate."""

    def __init__(self, message: str, *, cycle: int | None = None, phase: str | None = None):
        if cycle is not None or phase is not None:
            message = f"{message} (cycle {cycle}, phase {phase})"
        super().__init__(message)
        self.cycle = cycle
        self.phase = phase


class TraceMismatchError(LodanaError):
    """A recorded decision could not be applied during replay."""

    def __init__(self, message: str, *, cycle: int, phase: str):
        super().__init__(f"trace mismatch at cycle {cycle}, phase {phase}: {message}")
        self.cycle = cycle
        self.phase = phase
