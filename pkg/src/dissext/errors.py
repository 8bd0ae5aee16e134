class DomainViolation(ValueError):
    """An input function is outside the domain a check requires."""


class NotInWStarDomain(DomainViolation):
    """The complement vector is not in the domain of ``W*``; no dissipative extension exists."""


class ConditionFailed(ValueError):
    pass


class TruncationTooSmall(RuntimeError):
    pass


class UnstableNullity(RuntimeError):
    pass
