"""Exception hierarchy shared across the package.

The CLI maps these onto its exit-code contract: parse errors exit 2,
semantic errors exit 3, resource limits exit 4.
"""


class OntofuseError(Exception):
    pass


class ParseError(OntofuseError):
    """Malformed concrete syntax.  Carries the source span when known."""

    def __init__(self, message, span=None):
        super().__init__(message)
        self.span = span

    def __str__(self):
        msg = super().__str__()
        if self.span is not None:
            return f"{self.span}: {msg}"
        return msg


class SemanticError(OntofuseError):
    """Well-formed syntax with an invalid meaning (undeclared symbol,
    dangling reference, invalid morphism, ...)."""

    def __init__(self, message, span=None):
        super().__init__(message)
        self.span = span

    def __str__(self):
        msg = super().__str__()
        if self.span is not None:
            return f"{self.span}: {msg}"
        return msg


class ArityMismatchError(SemanticError):
    """A signature morphism maps an operation to one of different arity."""


class ArityConflictError(SemanticError):
    """A colimit quotient class contains operations of different arities."""


class TheoryMorphismError(SemanticError):
    """A claimed theory morphism does not map axioms to theorems."""


class NoMediatorError(OntofuseError):
    """A competitor cocone does not factor through the fusion cocone."""


class ResourceLimitError(OntofuseError):
    """An enumeration would exceed the configured bounds."""
