from typing import Optional


class MocheckError(Exception):
    """Base class for every error the engine reports to callers."""


class ModelError(MocheckError):
    """Syntax or semantic problem in a model file or an Mdp under construction."""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        # parsers report end of input as line -1
        if line is not None and line < 1:
            line, column = None, None
        self.line = line
        self.column = column
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "")
            message = f"{where}: {message}"
        super().__init__(message)


class AutomatonError(ModelError):
    pass


class QueryError(ModelError):
    pass


class StrategyError(MocheckError):
    """A strategy that does not fit the model it is applied to."""


class LimitExceeded(MocheckError):
    """A configured size cap (subsets, disjuncts, oracle strategies, layers) was hit."""


class SolverError(MocheckError):
    """Internal inconsistency in an exact solve. Never expected on valid input."""
