from dataclasses import dataclass
from typing import Tuple

from app.exceptions import DomainError
from app.models.poly import BivariatePoly


@dataclass(frozen=True)
class TMInstance:
    """F(x, y) = b * p_1^z_1 ... p_s^z_s, optionally up to sign."""

    form: BivariatePoly
    b: int = 1
    primes: Tuple[int, ...] = ()
    coprime: bool = True
    signed: bool = True
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "primes", tuple(self.primes))
        if self.form.degree < 3:
            raise DomainError(f"Thue-Mahler form must have degree >= 3, got {self.form.degree}")
        if list(self.primes) != sorted(set(self.primes)):
            raise DomainError("instance primes must be distinct and increasing")
        if self.b == 0:
            raise DomainError("the fixed factor b must be nonzero")


@dataclass(frozen=True, order=True)
class TMSolution:
    x: int
    y: int
    exponents: Tuple[int, ...] = ()

    def as_triple(self) -> Tuple[int, ...]:
        return (self.x, self.y, *self.exponents)
