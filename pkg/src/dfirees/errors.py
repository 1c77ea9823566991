"""Exception types shared across the package."""


class DfireesError(Exception):
    """Base class for package errors."""


class ZeroPolynomial(DfireesError):
    """Operation undefined for the zero polynomial."""


class UnboundVariable(DfireesError):
    """A substitution omitted a variable that occurs in the input."""


class BadIndex(DfireesError):
    """Matrix or facet index out of range / not strictly increasing."""


class DuplicateVertex(DfireesError):
    """Vertex inserted into a facet that already contains it."""


class NotClosed(DfireesError):
    """Operation requires a closed simplicial complex."""


class NotInImage(DfireesError):
    """Monomial does not lie in the image of the monomial presentation."""


class NonTermination(DfireesError):
    """Rewriting exhausted its step budget (incoherently marked rules)."""


class NotLiftable(DfireesError):
    """No lift with dominated tail exists for the given binomial."""


class BudgetExceeded(DfireesError):
    """A degree or step budget was hit in strict mode."""


class ParseError(DfireesError):
    """Malformed textual input (complex file or monomial)."""
