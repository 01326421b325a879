from dataclasses import dataclass, field
from typing import Dict, List, Tuple

from app.exceptions import DomainError, OutOfRangeError


@dataclass(frozen=True)
class QExpansion:
    """Truncated q-expansion of Delta: coeffs[n] = tau(n) for 1 <= n <= limit.

    Slot 0 of ``coeffs`` is a placeholder so indices match n.
    """

    limit: int
    coeffs: Tuple[int, ...] = field(repr=False)

    def __post_init__(self):
        if self.limit < 1:
            raise DomainError("QExpansion limit must be positive")
        if len(self.coeffs) != self.limit + 1:
            raise DomainError(
                f"QExpansion of limit {self.limit} needs {self.limit + 1} slots, got {len(self.coeffs)}"
            )

    def __getitem__(self, n: int) -> int:
        if n < 1 or n > self.limit:
            raise OutOfRangeError(f"tau({n}) is outside the expansion limit {self.limit}")
        return self.coeffs[n]

    def __len__(self) -> int:
        return self.limit

    def truncate(self, limit: int) -> "QExpansion":
        if limit > self.limit:
            raise OutOfRangeError(f"cannot extend expansion from {self.limit} to {limit}")
        return QExpansion(limit=limit, coeffs=self.coeffs[: limit + 1])

    def __repr__(self):
        return f"<QExpansion(limit={self.limit})>"


@dataclass(frozen=True)
class FactorBudget:
    trial_limit: int = 1_000_000
    rho_rounds: int = 1_000_000

    def __post_init__(self):
        if self.trial_limit < 2:
            raise DomainError("trial_limit must be at least 2")
        if self.rho_rounds < 0:
            raise DomainError("rho_rounds must be nonnegative")


@dataclass(frozen=True)
class PFResult:
    """Largest prime factor found, and whether the factorization finished."""

    value: int
    complete: bool


@dataclass
class Factorization:
    primes: Dict[int, int] = field(default_factory=dict)
    composites: List[int] = field(default_factory=list)

    @property
    def complete(self) -> bool:
        return not self.composites

    def add_prime(self, p: int, e: int = 1) -> None:
        self.primes[p] = self.primes.get(p, 0) + e

    def format(self) -> str:
        parts = [f"{p}^{e}" if e > 1 else str(p) for p, e in sorted(self.primes.items())]
        parts.extend(f"C{len(str(c))}({c})" for c in sorted(self.composites))
        return " * ".join(parts) if parts else "1"
