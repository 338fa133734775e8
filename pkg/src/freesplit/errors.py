"""Exception types shared across the library."""


class InvalidInput(ValueError):
    """An argument violates a documented precondition."""


class BudgetExhausted(RuntimeError):
    """A computation exceeded its configured length/iteration budget."""


class NumericalTolerance(ArithmeticError):
    """An iterative numeric routine failed to converge within its cap."""


class NotApplicable(RuntimeError):
    """The requested certificate does not exist for this input."""


class FixtureInvalid(RuntimeError):
    """A catalog fixture failed one of its load-time assertions."""
