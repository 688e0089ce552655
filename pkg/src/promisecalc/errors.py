"""Exceptions raised by promisecalc"""


class PromiseCalcError(Exception):
    """Base class for every library error"""


class ValidationError(PromiseCalcError):
    """An input violates an operation's contract"""


class ConfigError(ValidationError):
    pass


class OfferRejected(ValidationError):
    pass


class PermissionDenied(PromiseCalcError):
    """An agent acted on another agent's internal state"""


class StateError(PromiseCalcError):
    """Illegal lifecycle transition"""


class EvaluationError(PromiseCalcError):
    pass


class BudgetError(PromiseCalcError):
    pass


class ExpressionSyntaxError(PromiseCalcError):
    def __init__(self, message, col=1):
        super().__init__(message)
        self.col = col


class ScenarioSyntaxError(PromiseCalcError):
    def __init__(self, message, line, col=1):
        super().__init__(f"line {line}, column {col}: {message}")
        self.line = line
        self.col = col
