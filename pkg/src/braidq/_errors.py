from __future__ import annotations


class InternalInconsistencyError(Exception):
    """A computation contradicted an identity that holds mathematically."""


class NonExactDivision(InternalInconsistencyError):  # noqa: N818
    """A polynomial division that must be exact left a remainder."""


class ClassificationMismatch(InternalInconsistencyError):  # noqa: N818
    """A computed gcd disagrees with the cyclotomic gcd classification."""


class RemainderNotDivisibleByP(InternalInconsistencyError):  # noqa: N818
    """The remainder of a cyclotomic split is not divisible by the prime."""


class NotAComplex(InternalInconsistencyError):  # noqa: N818
    """Two consecutive differentials do not compose to zero."""


class UnfactoredResidual(InternalInconsistencyError):  # noqa: N818
    """An elementary divisor is not a product of cyclotomic polynomials."""


class NonDivisibleByP(InternalInconsistencyError):  # noqa: N818
    """A lifted coboundary is not divisible by the prime."""


class InconsistentRanks(InternalInconsistencyError):  # noqa: N818
    """The universal coefficient recursion has no valid solution."""


class NotFound(LookupError):  # noqa: N818
    """A search ran past the computed range."""
