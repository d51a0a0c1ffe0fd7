"""Exception hierarchy shared by all modules."""


class MarkovBasisError(Exception):
    """Base class for domain errors (the CLI maps these to exit code 1)."""


class ModelError(MarkovBasisError, ValueError):
    """Malformed model, cell, or variable subset."""


class NegativeCell(MarkovBasisError):
    """A move would drive some cell count below zero."""


class IdenticalTables(MarkovBasisError):
    pass


class MarginalMismatch(MarkovBasisError):
    pass


class Inconsistent(MarkovBasisError):
    """Marginals disagree, or cannot be realized by any table."""


class NotDegreeTwo(MarkovBasisError):
    pass


class NotChordal(MarkovBasisError):
    pass


class NotDecomposable(MarkovBasisError):
    pass


class NotABasis(MarkovBasisError):
    """GF(2) vectors are linearly dependent or of the wrong shape."""


class DegreeMismatch(MarkovBasisError):
    pass


class EmptyBasis(MarkovBasisError):
    pass


class TooLarge(MarkovBasisError):
    """A brute-force routine would exceed its configured cap."""
