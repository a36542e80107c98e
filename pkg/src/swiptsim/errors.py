"""Exception types shared across the simulator."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ContractError(ValueError):
    """Inputs are individually valid but inconsistent with each other."""


class AccuracyError(ArithmeticError):
    """Adaptive quadrature ran out of subdivision budget.

    ``estimate`` holds the best value reached so the caller can decide
    whether it is usable.
    """

    def __init__(self, message, estimate):
        super().__init__(message)
        self.estimate = estimate
