"""Exception types shared across the toolkit."""


class DomainError(ValueError):
    """An argument lies outside the domain of a function."""


class ConfigError(ValueError):
    """A configuration object violates its invariants."""


class ContractViolation(RuntimeError):
    """A numeric invariant was found broken at runtime."""
