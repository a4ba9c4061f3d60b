"""Semantic exceptions shared across the package."""


class UrnsimError(Exception):
    """Base class for all package errors."""


class ParamDomainError(UrnsimError, ValueError):
    """Model parameter outside the domain required by the operation."""


class DomainError(UrnsimError, ValueError):
    """Argument outside an operation's precondition."""


class OrderViolationError(UrnsimError, ValueError):
    """Equalization quantities require b > w."""


class AbsorbedStateError(UrnsimError):
    """A frozen (absorbed) state was asked to take a step."""


class HorizonZeroError(UrnsimError, ValueError):
    """Neither t_max nor event_budget was given for a simulation horizon."""


class EventBudgetExceededError(UrnsimError, RuntimeError):
    """A continuous-time simulation exceeded the hard event cap."""


class InsufficientDataError(UrnsimError, ValueError):
    """Not enough trajectories or records for the requested statistic."""


class SizeMismatchError(UrnsimError, ValueError):
    """Paired-sample statistic called with unequal sample sizes."""


class EmptySampleError(UrnsimError, ValueError):
    """Empirical statistic called with an empty sample."""
