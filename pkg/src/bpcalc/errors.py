"""Exception types shared across the workbench."""


class BPCalcError(Exception):
    """Base class for workbench errors."""


class TruncationError(BPCalcError):
    """A computation needs a generator index beyond the configured truncation."""


class ParseError(BPCalcError):
    """A literal (number, polynomial, operation, group, category) failed to parse."""


class NotDivisibleError(BPCalcError):
    """Exact division was requested but no exact quotient exists."""


class DegreeError(BPCalcError):
    """A grading consistency check failed."""


class AlphabetError(BPCalcError):
    """Operands over different alphabets were mixed."""
