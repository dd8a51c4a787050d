"""Exception hierarchy.

Every error carries an exit code used by the command line front end:
1 for bad input or failed validation, 2 for resource or convergence trouble.
"""

from __future__ import annotations


class SystoleLabError(Exception):
    exit_code = 1


class InputError(SystoleLabError):
    """Malformed or inconsistent input."""


class ResourceError(SystoleLabError):
    exit_code = 2


class ValidationError(InputError):
    """Surface failed validation; ``violations`` lists every problem found."""

    def __init__(self, violations: list[tuple[str, str]]):
        self.violations = list(violations)
        kinds = sorted({kind for kind, _ in self.violations})
        head = "; ".join(msg for _, msg in self.violations[:5])
        more = "" if len(self.violations) <= 5 else f" (+{len(self.violations) - 5} more)"
        super().__init__(f"{', '.join(kinds)}: {head}{more}")

    @property
    def kinds(self) -> set[str]:
        return {kind for kind, _ in self.violations}


class DegenerateTriangle(InputError):
    pass


class SingularBasis(InputError):
    pass


class SimplyConnected(InputError):
    pass


class TrivialHomology(InputError):
    pass


class InvalidAlpha(InputError):
    pass


class InvalidRadii(InputError):
    pass


class InvalidParams(InputError):
    pass


class InvalidStart(InputError):
    pass


class UnsortedLs(InputError):
    pass


class WindowTooSmall(InputError):
    pass


class MismatchedModel(InputError):
    pass


class RadiusTooLarge(InputError):
    pass


class NotApplicable(InputError):
    pass


class UnknownGenerator(InputError):
    pass


class UnsupportedFormat(InputError):
    pass


class DegenerateMetric(InputError):
    pass


class ResourceLimit(ResourceError):
    pass


class MaxIterations(ResourceError):
    pass


class NoAdmissibleBall(ResourceError):
    pass
