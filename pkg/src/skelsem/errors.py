"""Exception hierarchy shared across the engine."""


class SkelsemError(Exception):
    """Base class for all engine errors."""


class UnknownVariable(SkelsemError):
    pass


class UnknownConstructor(SkelsemError):
    pass


class UnknownFilter(SkelsemError):
    pass


class SortMismatch(SkelsemError):
    def __init__(self, message, position=None, expected=None, found=None):
        super().__init__(message)
        self.position = position
        self.expected = expected
        self.found = found


class PathOutOfRange(SkelsemError):
    pass


class PathIntoLeaf(SkelsemError):
    pass


class DriverBudgetExceeded(SkelsemError):
    pass


class ArityMismatch(SkelsemError):
    pass


class FuelExhausted(SkelsemError):
    """Raised when hook recursion hits the evaluation budget."""


class IllSortedEnv(SkelsemError):
    pass


class IllSortedQuery(SkelsemError):
    pass


class IllSortedTriple(SkelsemError):
    pass


class CoverCheckUnsupported(SkelsemError):
    """State-cover test fell outside the implemented fragment."""


class JoinUndefined(SkelsemError):
    """The two abstract values have no least upper bound in this domain."""


class SolutionCheckFailed(SkelsemError):
    pass


class InvariantCheckFailed(SkelsemError):
    pass


class UndefinedHookPoint(SkelsemError):
    pass


class DfvarViolation(SkelsemError):
    pass


class ParseError(SkelsemError):
    def __init__(self, message, line, col):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col
