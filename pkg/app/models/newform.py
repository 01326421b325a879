from dataclasses import dataclass, field
from typing import Dict, Tuple

from app.exceptions import EigendataValidationError, MissingEigenvalueError, SingularCurveError


@dataclass(frozen=True)
class CurveModEll:
    """Y^2 = X^3 + a2 X^2 + a4 X over F_ell."""

    ell: int
    a2: int
    a4: int

    def __post_init__(self):
        object.__setattr__(self, "a2", self.a2 % self.ell)
        object.__setattr__(self, "a4", self.a4 % self.ell)
        if self.discriminant() == 0:
            raise SingularCurveError(
                f"Y^2 = X^3 + {self.a2} X^2 + {self.a4} X is singular mod {self.ell}"
            )

    @property
    def a_invariants(self) -> Tuple[int, int, int, int, int]:
        return (0, self.a2, 0, self.a4, 0)

    def discriminant(self) -> int:
        # disc of X(X^2 + a2 X + a4), up to the factor 16
        return (self.a4 * self.a4 * (self.a2 * self.a2 - 4 * self.a4)) % self.ell


@dataclass(frozen=True)
class CurveModel:
    """Rational elliptic curve in long Weierstrass form, tagged with its newform."""

    level: int
    label: str
    a1: int
    a2: int
    a3: int
    a4: int
    a6: int

    @property
    def a_invariants(self) -> Tuple[int, int, int, int, int]:
        return (self.a1, self.a2, self.a3, self.a4, self.a6)

    def c4_c6_disc(self) -> Tuple[int, int, int]:
        a1, a2, a3, a4, a6 = self.a_invariants
        b2 = a1 * a1 + 4 * a2
        b4 = 2 * a4 + a1 * a3
        b6 = a3 * a3 + 4 * a6
        b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
        c4 = b2 * b2 - 24 * b4
        c6 = -b2 ** 3 + 36 * b2 * b4 - 216 * b6
        disc = -b2 * b2 * b8 - 8 * b4 ** 3 - 27 * b6 * b6 + 9 * b2 * b4 * b6
        return c4, c6, disc


@dataclass(frozen=True)
class NewformEigenData:
    """Hecke eigenvalue data of one weight-2 newform (one Galois orbit).

    ``charpolys[ell]`` lists the characteristic polynomial of c_ell in
    ascending powers, ending with the leading 1.
    """

    level: int
    label: str
    degree: int
    charpolys: Dict[int, Tuple[int, ...]] = field(default_factory=dict)

    def __post_init__(self):
        for ell, poly in self.charpolys.items():
            if len(poly) != self.degree + 1:
                raise EigendataValidationError(
                    self.label, ell, f"charpoly has degree {len(poly) - 1}, expected {self.degree}"
                )
            if poly[-1] != 1:
                raise EigendataValidationError(self.label, ell, "charpoly is not monic")

    @property
    def is_rational(self) -> bool:
        return self.degree == 1

    def charpoly(self, ell: int) -> Tuple[int, ...]:
        try:
            return self.charpolys[ell]
        except KeyError:
            raise MissingEigenvalueError(self.label, ell) from None

    def norm_of_difference(self, a: int, ell: int) -> int:
        """Norm(a - c_ell) = charpoly_ell(a)."""
        total = 0
        for c in reversed(self.charpoly(ell)):
            total = total * a + c
        return total

    def rational_ap(self, ell: int) -> int:
        if not self.is_rational:
            raise EigendataValidationError(self.label, ell, "form is not rational")
        return -self.charpoly(ell)[0]

    def to_payload(self) -> dict:
        return {
            "level": self.level,
            "label": self.label,
            "degree": self.degree,
            "charpolys": {str(ell): list(poly) for ell, poly in self.charpolys.items()},
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "NewformEigenData":
        return cls(
            level=int(payload["level"]),
            label=payload["label"],
            degree=int(payload["degree"]),
            charpolys={int(ell): tuple(poly) for ell, poly in payload["charpolys"].items()},
        )

    def __repr__(self):
        return f"<NewformEigenData(level={self.level}, label='{self.label}', degree={self.degree})>"
