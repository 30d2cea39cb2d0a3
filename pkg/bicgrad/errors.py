from __future__ import annotations


class PoleError(ValueError):
    """Raised when a potential or gradient is requested at an atom."""

    def __init__(self, position: tuple[float, float], weight: float) -> None:
        self.position = (float(position[0]), float(position[1]))
        self.weight = float(weight)
        # -(1/2pi) w log|x - a| tends to +inf for w > 0
        self.sign = 1 if weight > 0 else -1
        side = "+inf" if self.sign > 0 else "-inf"
        super().__init__(
            f"evaluation at atom {self.position} (weight {self.weight:g}) is a pole ({side})"
        )


class ConfigError(ValueError):
    """Invalid experiment configuration; `key` is the dotted path of the offender."""

    def __init__(self, key: str, message: str) -> None:
        self.key = key
        super().__init__(f"{key}: {message}" if key else message)


class ResolutionWarning(UserWarning):
    """A result was computed but the grid barely resolves the requested scale."""
