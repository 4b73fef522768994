"""Typed exceptions raised across the package.

Every error a caller might reasonably want to branch on has its own class.
All of them derive from :class:`CvlabError` so a batch driver can catch the
whole family in one place.
"""

from __future__ import annotations


class CvlabError(Exception):
    """Base class for all package errors."""


class InvalidArgument(CvlabError, ValueError):
    """An argument is outside the documented domain."""


class NonPhysicalState(CvlabError):
    """A Gaussian state fails the physicality checks.

    Attributes:
        report: the :class:`~cvlab.gaussian.PhysicalityReport` that failed.
    """

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


class NumericalDegeneracy(CvlabError):
    """A matrix that must be inverted is singular or badly conditioned."""


class UnstableRegime(CvlabError):
    """Parameters fall in a sector where the memory closure is refused."""


class InfeasibleFreezing(CvlabError):
    """The critical-detuning formula has no real solution."""


class StiffnessFailure(CvlabError):
    """The adaptive integrator could not make progress.

    Attributes:
        time: integration time at which the step size underflowed.
    """

    def __init__(self, message: str, time: float):
        super().__init__(message)
        self.time = float(time)


class TruncationRisk(CvlabError):
    """An input exceeds what the Fock truncation can represent."""


class LeakageBreach(CvlabError):
    """Truncated Fock evolution lost too much population.

    Attributes:
        time: sample time at which the leakage budget was exceeded.
        leakage: the leakage value at that time.
    """

    def __init__(self, message: str, time: float, leakage: float):
        super().__init__(message)
        self.time = float(time)
        self.leakage = float(leakage)


class ConfigError(CvlabError):
    """An experiment configuration failed validation.

    Attributes:
        problems: list of human-readable messages, one per offending key.
    """

    def __init__(self, problems: list[str]):
        super().__init__("invalid configuration:\n  " + "\n  ".join(problems))
        self.problems = list(problems)


class MissingArtifact(CvlabError):
    """A run directory lacks a file that post-processing needs."""
