"""Exception hierarchy for stabkit."""


class StabError(Exception):
    """Base class for every error raised by this package."""


class SegmentOutOfBounds(StabError):
    pass


class ZeroLength(StabError):
    pass


class EpsilonInvalid(StabError):
    pass


class OrientationViolation(StabError):
    pass


class SideTooLong(StabError):
    pass


class RecordMismatch(StabError):
    pass


class BudgetExceeded(StabError):
    pass


class Infeasible(StabError):
    pass


class CapExceeded(StabError):
    pass


class MemoOverflow(StabError):
    def __init__(self, message, stats=None):
        super().__init__(message)
        self.stats = stats


class VerticalLeak(StabError):
    pass


class GuessSpaceExceeded(StabError):
    pass


class ParseError(StabError):
    pass


class UnknownSolver(StabError):
    pass


class BadParams(StabError):
    pass
