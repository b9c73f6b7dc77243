"""Exception hierarchy shared by the library and the CLI."""


class OnewayError(Exception):
    """Base class for all library errors."""


class ValidationError(OnewayError, ValueError):
    """An input violates an invariant (bad cell, mass, shape, function kind)."""


class CapExceededError(OnewayError):
    """An exact enumeration would exceed its configured desk-scale cap."""

    def __init__(self, what: str, size, limit, key: str):
        self.what = what
        self.size = size
        self.limit = limit
        self.key = key
        super().__init__(f"{what}: {size} exceeds the limit {limit} (raise CONFIG['{key}'] to allow)")


class InfeasibleError(OnewayError):
    """The requested quantity does not exist for these inputs."""


class BoundNotApplicable(InfeasibleError):
    """The preconditions of an inequality are not met, so no bound is claimed."""


class SamplerError(OnewayError):
    """The correlation sampler ran past its round guard."""
