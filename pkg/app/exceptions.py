"""Error hierarchy shared by every module.

Anything raised from here is a usage or data problem (exit status 2 at the
CLI). Failed checks are never exceptions; they are report entries.
"""
from typing import Dict, List, Optional, Sequence


class TauVerifierError(Exception):
    """Base class for all toolkit errors."""


class ResourceLimitError(TauVerifierError):
    pass


class OutOfRangeError(TauVerifierError):
    pass


class DomainError(TauVerifierError):
    pass


class FactorizationBudgetExceeded(TauVerifierError):
    """Raised when a factorization cannot finish within its budget."""

    def __init__(self, message: str, primes: Optional[Dict[int, int]] = None,
                 composites: Optional[List[int]] = None):
        super().__init__(message)
        self.primes = dict(primes or {})
        self.composites = list(composites or [])


class ZeroTraceError(TauVerifierError):
    pass


class LucasPairError(TauVerifierError):
    pass


class PolynomialDivisionError(TauVerifierError):
    pass


class PolynomialParseError(TauVerifierError):
    pass


class InapplicableCongruenceError(TauVerifierError):
    pass


class SingularCurveError(TauVerifierError):
    pass


class MissingEigenvalueError(TauVerifierError):
    def __init__(self, label: str, ell: int):
        super().__init__(f"Newform {label} has no eigenvalue data at ell={ell}")
        self.label = label
        self.ell = ell


class MissingEigendataError(TauVerifierError):
    def __init__(self, levels: Sequence[int], hint: Optional[str] = None):
        levels = sorted(set(levels))
        message = f"No eigendata for required levels: {', '.join(map(str, levels))}"
        super().__init__(f"{message}; {hint}" if hint else message)
        self.levels = levels


class EigendataParseError(TauVerifierError):
    def __init__(self, line_number: int, message: str):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class EigendataValidationError(TauVerifierError):
    def __init__(self, label: str, ell: Optional[int], message: str):
        where = f"{label}" if ell is None else f"{label} at ell={ell}"
        super().__init__(f"{where}: {message}")
        self.label = label
        self.ell = ell


class SieveProblemError(TauVerifierError):
    pass


class FixtureError(TauVerifierError):
    pass
