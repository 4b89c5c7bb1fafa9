"""Exception types raised by the toolkit."""


class CapacityError(ValueError):
    """A size limit (brute-force cap, alternating-sum cap) was exceeded."""

    def __init__(self, what, value, cap):
        super().__init__(f"{what}={value} exceeds the supported cap of {cap}")
        self.value = value
        self.cap = cap


class UnderSampledError(RuntimeError):
    """Too few errors were collected to estimate a slope."""
