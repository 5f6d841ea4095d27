"""Exception hierarchy shared by all modules."""


class EntangledGraphError(Exception):
    pass


class DomainError(EntangledGraphError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ParseError(EntangledGraphError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class FormulaValidityError(DomainError):
    """The closed-form pair concurrence does not apply; use the oracle instead."""


class MonotonicityError(EntangledGraphError):
    pass


class NumericError(EntangledGraphError, ArithmeticError):
    pass


class NonConvergenceError(EntangledGraphError):
    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class CapacityError(EntangledGraphError):
    pass
