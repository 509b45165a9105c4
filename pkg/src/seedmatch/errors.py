"""Exception types. All are ``ValueError`` subclasses so callers can catch
input problems uniformly; the CLI maps them to exit code 2."""
from __future__ import annotations


class ContractError(ValueError):
    """Arguments violate an operation's preconditions."""


class UndefinedDensityError(ContractError):
    """Density requested for fewer than two vertices."""


class DegenerateStrengthError(ContractError):
    """Alignment-strength denominator is zero.

    Happens when both graphs are empty or both are complete on the vertex set
    in question, so every bijection has the same number of disagreements.
    """

    def __init__(self, density1: float, density2: float):
        self.density1 = density1
        self.density2 = density2
        super().__init__(
            f"alignment strength undefined: densities {density1!r} and {density2!r} "
            "give a zero chance-disagreement rate"
        )


class DegenerateMeanError(ContractError):
    """Bernoulli mean is 0 or 1, so heterogeneity correlation is undefined."""


class SpecError(ContractError):
    """A generative or experiment specification is invalid."""


class SizeLimitError(ContractError):
    """Instance too large for the exact matcher."""


class ParseError(ContractError):
    def __init__(self, path, line: int, message: str):
        self.path = str(path)
        self.line = line
        super().__init__(f"{self.path}:{line}: {message}")
