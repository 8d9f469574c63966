"""Exception hierarchy shared by every module.

The CLI maps these onto exit codes, so keep the classes flat.
"""


class NonSubGreedyError(Exception):
    """Base class for all library errors."""


class DomainError(NonSubGreedyError, ValueError):
    """An argument lies outside the domain of an operation."""


class ValidationError(NonSubGreedyError, ValueError):
    """An input failed a declared property check (monotone, submodular, ...)."""


class CapacityError(NonSubGreedyError, RuntimeError):
    """An exhaustive enumeration would exceed its configured budget."""


class DegenerateBoundError(NonSubGreedyError, ValueError):
    """A guarantee collapses to zero (beta == 1) and certifies nothing."""


class DegenerateEvidenceError(NonSubGreedyError, ValueError):
    """A measurement has zero probability under the current belief."""


class UncertifiableError(NonSubGreedyError, RuntimeError):
    """A greedy run cannot be certified (infinite eta or vacuous bound)."""
