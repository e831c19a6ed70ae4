"""Exception types and the pass/fail report used by every checking operation."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


class StabLabError(Exception):
    """Base class for all library errors."""


class ModelMismatchError(StabLabError):
    """An object, heart or stability condition does not belong to the model at hand."""


class DomainError(StabLabError, ValueError):
    """An argument lies outside the domain of the operation (zero object, bad interval, ...)."""


class NotHNCompleteError(StabLabError):
    """The triangle data of the model does not yield a Harder-Narasimhan filtration."""


class UniquenessViolationError(StabLabError):
    """Two inequivalent Harder-Narasimhan filtrations were found; the model data is inconsistent."""


class ModelDataError(StabLabError):
    """Model data fails an invariant (invalid heart, torsion pair, round trip...)."""


class HeartResolutionError(StabLabError):
    """No atlas heart matches the requested slicing."""


class ModelTooLargeError(StabLabError):
    """Atlas construction exceeded its cap."""


class NeedMoreSamplesError(StabLabError):
    """A sampled sequence is too short or too coarse for the requested tolerance."""


class ScheduleError(StabLabError):
    """A sampled sequence contradicts its own epsilon schedule."""


@dataclass
class Check:
    name: str
    passed: bool
    witness: Any = None

    def as_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "witness": self.witness}


@dataclass
class Report:
    checks: list = field(default_factory=list)

    def add(self, name: str, passed: bool, witness: Any = None) -> None:
        self.checks.append(Check(name, bool(passed), witness))

    def extend(self, other: "Report") -> None:
        self.checks.extend(other.checks)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list:
        return [c for c in self.checks if not c.passed]

    def __getitem__(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def as_list(self) -> list:
        return [c.as_dict() for c in self.checks]
