"""Exception hierarchy.

Domain errors (exit code 1 on the command line) carry a ``witness`` tuple
pointing at the offending indices; :class:`ParseError` (exit code 2) carries
the field locus of malformed input.
"""

from __future__ import annotations


class CovpropError(Exception):
    @property
    def name(self) -> str:
        return type(self).__name__


class DomainError(CovpropError):
    def __init__(self, message: str = "", witness=None):
        super().__init__(message)
        self.witness = witness


class ParseError(CovpropError):
    def __init__(self, message: str, locus: str | None = None):
        super().__init__(f"{locus}: {message}" if locus else message)
        self.locus = locus


# core monoid axioms
class MonoidAxiomError(DomainError):
    pass


class MalformedTable(MonoidAxiomError):
    pass


class NotAssociative(MonoidAxiomError):
    pass


class IdentityNotUnit(MonoidAxiomError):
    pass


class NotAMetric(MonoidAxiomError):
    def __init__(self, message: str = "", witness=None, axiom: str = ""):
        super().__init__(message, witness)
        self.axiom = axiom


class LeftInvarianceViolated(MonoidAxiomError):
    pass


class InverseInvalid(MonoidAxiomError):
    pass


class NotAGroup(DomainError):
    pass


class PreconditionFailed(DomainError):
    pass


class SizeLimitExceeded(DomainError):
    pass


class DimensionMismatch(DomainError):
    pass


class InvalidState(DomainError):
    pass


class InvalidKernel(DomainError):
    pass


class ActionNotMorphism(DomainError):
    pass


class IdentityNotFixed(DomainError):
    pass


class NotFullIsometry(DomainError):
    pass


class SeminormExceeded(DomainError):
    pass


class InvalidTunnel(DomainError):
    pass


class BudgetExceeded(DomainError):
    pass


class OutOfBall(DomainError):
    pass


class HypothesisFailed(DomainError):
    def __init__(self, message: str = "", witness=None, hypothesis: int = 0):
        super().__init__(f"hypothesis {hypothesis}: {message}" if hypothesis else message, witness)
        self.hypothesis = hypothesis


class LemmaViolation(CovpropError):
    """A statement that is a theorem failed on concrete data; always a bug."""
