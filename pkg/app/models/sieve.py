from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, FrozenSet, Optional, Tuple

from sympy import isprime, multiplicity, primefactors
from sympy.ntheory import n_order

from app.exceptions import SieveProblemError

TAU_P3_LEVELS = (256, 256 * 5, 256 * 11, 256 * 55)
TAU_P3_ELLS = (3, 7, 13, 23)


class SieveKind(str, Enum):
    TAU_P2 = "TAU_P2"
    TAU_P4 = "TAU_P4"
    TAU_P3 = "TAU_P3"


def rad(n: int) -> int:
    out = 1
    for p in primefactors(abs(n)):
        out *= p
    return out


def excluded_primes(kind: SieveKind, kappa: int, q: Optional[int]) -> FrozenSet[int]:
    """Primes that may never enter L for this kind."""
    bad = {2, 11}
    bad.update(primefactors(abs(kappa)))
    if q is not None:
        bad.add(q)
    if kind in (SieveKind.TAU_P4, SieveKind.TAU_P3):
        bad.add(5)
    return frozenset(bad)


@dataclass(frozen=True)
class SieveProblem:
    kind: SieveKind
    kappa: int = 1
    q: Optional[int] = None
    modulus: int = 396
    ells: Optional[Tuple[int, ...]] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", SieveKind(self.kind))
        if self.ells is not None:
            object.__setattr__(self, "ells", tuple(sorted(set(self.ells))))
        if self.kind is SieveKind.TAU_P3:
            self._validate_ells()
            return
        if self.q is None or self.q == 2 or not isprime(self.q):
            raise SieveProblemError(f"q must be an odd prime, got {self.q}")
        if self.kappa % 2 == 0:
            raise SieveProblemError(f"kappa must be odd, got {self.kappa}")
        if self.kappa % self.q == 0:
            raise SieveProblemError(f"q={self.q} divides kappa={self.kappa}")
        if self.modulus <= 0 or self.modulus % 22:
            raise SieveProblemError(f"modulus M={self.modulus} must be a positive multiple of 22")
        if self.kind is SieveKind.TAU_P4:
            if self.q == 5:
                raise SieveProblemError("q must not be 5 for TAU_P4")
            if self.kappa and multiplicity(5, abs(self.kappa)) > 1:
                raise SieveProblemError(f"ord_5(kappa) must be 0 or 1, got kappa={self.kappa}")
        self._validate_ells()

    def _validate_ells(self):
        if self.ells is None:
            return
        bad = excluded_primes(self.kind, self.kappa, self.q)
        for ell in self.ells:
            if not isprime(ell) or ell in bad:
                raise SieveProblemError(f"ell={ell} is not admissible for {self.kind.value}")
            if self.q is not None and self.modulus % n_order(self.q, ell):
                raise SieveProblemError(
                    f"order of {self.q} mod {ell} does not divide M={self.modulus}"
                )

    def levels(self) -> Dict[int, bool]:
        """Admissible levels N', mapped to whether 11 | beta is forced there."""
        if self.kind is SieveKind.TAU_P3:
            return {level: False for level in TAU_P3_LEVELS}
        if self.kind is SieveKind.TAU_P2:
            base = 32 * rad(self.kappa)
        elif self.kappa % 5 == 0:
            base = 8 * 25 * rad(self.kappa // 5)
        else:
            base = 8 * 5 * rad(self.kappa)
        return {base * self.q: False, base: True}

    def to_payload(self) -> dict:
        return {
            "kind": self.kind.value,
            "kappa": self.kappa,
            "q": self.q,
            "modulus": self.modulus,
            "ells": None if self.ells is None else list(self.ells),
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "SieveProblem":
        return cls(
            kind=SieveKind(payload["kind"]),
            kappa=int(payload["kappa"]),
            q=payload.get("q"),
            modulus=int(payload["modulus"]),
            ells=None if payload.get("ells") is None else tuple(payload["ells"]),
        )


@dataclass(frozen=True)
class SieveResult:
    label: str
    level: int
    h1: FrozenSet[int] = frozenset()
    h3: FrozenSet[int] = frozenset()
    pairs: Dict[int, FrozenSet[Tuple[int, int]]] = field(default_factory=dict)

    @property
    def empty(self) -> bool:
        if self.pairs:
            return any(not s for s in self.pairs.values())
        return not self.h1 and not self.h3

    def to_payload(self) -> dict:
        return {
            "label": self.label,
            "level": self.level,
            "h1": sorted(self.h1),
            "h3": sorted(self.h3),
            "pairs": {str(ell): sorted(list(pt) for pt in s) for ell, s in self.pairs.items()},
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "SieveResult":
        return cls(
            label=payload["label"],
            level=int(payload["level"]),
            h1=frozenset(payload["h1"]),
            h3=frozenset(payload["h3"]),
            pairs={
                int(ell): frozenset(tuple(pt) for pt in pts)
                for ell, pts in payload.get("pairs", {}).items()
            },
        )
