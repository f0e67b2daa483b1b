"""
Exception hierarchy for the hyperpolygon toolkit.

Every error carries the process exit code the command-line front end
returns when it escapes a sub-command.
"""


class HyperpolyError(Exception):
    """Base class for all toolkit errors."""

    exit_code = 1


class ConfigError(HyperpolyError):
    """Invalid run configuration (flags, environment, .env)."""

    exit_code = 3


class MalformedInputError(HyperpolyError):
    """Unreadable or structurally invalid JSON input."""

    exit_code = 3


class ExactModeRequired(HyperpolyError):
    """Operation is only defined over exact Gaussian rationals."""

    exit_code = 4


class SamplingError(HyperpolyError):
    """The level-set sampler could not produce a point."""

    exit_code = 2


class LevelSetError(HyperpolyError):
    """A point is not on the zero level of the complex moment map."""

    exit_code = 2


class StabilityError(HyperpolyError):
    """Stability was required but does not hold, or cannot be decided."""


class PoleError(HyperpolyError):
    """Evaluation of a rational object at one of its poles."""


class PolynomialQueryError(HyperpolyError):
    """Structural polynomial query with no defined answer."""


class HiggsInvariantError(HyperpolyError):
    """Higgs data violates one of its structural invariants."""


class ParabolicityError(HyperpolyError):
    """Residue does not respect the quasiparabolic line."""
