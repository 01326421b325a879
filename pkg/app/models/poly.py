import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Tuple, Union

from app.exceptions import DomainError, PolynomialDivisionError, PolynomialParseError

Number = Union[int, Fraction]


def _trim(coeffs: Sequence[int]) -> Tuple[int, ...]:
    return tuple(int(c) for c in coeffs)


@dataclass(frozen=True)
class BivariatePoly:
    """Homogeneous integer form in two variables.

    ``coeffs[i]`` is the coefficient of X^i * Y^(degree - i). The zero form is
    stored with degree 0 and acts as an additive identity for any degree.
    """

    coeffs: Tuple[int, ...]

    def __post_init__(self):
        if not self.coeffs:
            raise PolynomialParseError("a form needs at least one coefficient")
        object.__setattr__(self, "coeffs", _trim(self.coeffs))

    # construction

    @classmethod
    def zero(cls) -> "BivariatePoly":
        return cls((0,))

    @classmethod
    def one(cls) -> "BivariatePoly":
        return cls((1,))

    @classmethod
    def monomial(cls, x_power: int, y_power: int, coeff: int = 1) -> "BivariatePoly":
        coeffs = [0] * (x_power + y_power + 1)
        coeffs[x_power] = coeff
        return cls(tuple(coeffs))

    # basic properties

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def max_abs_coeff(self) -> int:
        return max(abs(c) for c in self.coeffs)

    def x_degree(self) -> int:
        """Highest power of X with a nonzero coefficient (-1 for the zero form)."""
        for i in range(self.degree, -1, -1):
            if self.coeffs[i]:
                return i
        return -1

    # arithmetic

    def __neg__(self) -> "BivariatePoly":
        return BivariatePoly(tuple(-c for c in self.coeffs))

    def __add__(self, other: "BivariatePoly") -> "BivariatePoly":
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        if self.degree != other.degree:
            raise DomainError(
                f"cannot add forms of degree {self.degree} and {other.degree}"
            )
        return BivariatePoly(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "BivariatePoly") -> "BivariatePoly":
        return self + (-other)

    def __mul__(self, other: Union["BivariatePoly", int]) -> "BivariatePoly":
        if isinstance(other, int):
            return BivariatePoly(tuple(other * c for c in self.coeffs))
        if self.is_zero() or other.is_zero():
            return BivariatePoly.zero()
        out = [0] * (self.degree + other.degree + 1)
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            for j, b in enumerate(other.coeffs):
                if b:
                    out[i + j] += a * b
        return BivariatePoly(tuple(out))

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "BivariatePoly":
        result = BivariatePoly.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def divmod_exact(self, other: "BivariatePoly") -> "BivariatePoly":
        """Exact quotient self / other.

        Raises PolynomialDivisionError when the division leaves a remainder.
        """
        if other.is_zero():
            raise PolynomialDivisionError("division by the zero form")
        if self.is_zero():
            return BivariatePoly.zero()
        q_degree = self.degree - other.degree
        if q_degree < 0:
            raise PolynomialDivisionError("divisor has larger degree than dividend")
        rem = list(self.coeffs)
        top = other.x_degree()
        lead = other.coeffs[top]
        quot = [0] * (q_degree + 1)
        for i in range(self.x_degree(), top - 1, -1):
            c = rem[i]
            if not c:
                continue
            k = i - top
            if c % lead or k > q_degree:
                raise PolynomialDivisionError("inexact division")
            qc = c // lead
            quot[k] = qc
            for j, b in enumerate(other.coeffs):
                if b:
                    rem[k + j] -= qc * b
        if any(rem):
            raise PolynomialDivisionError("inexact division")
        return BivariatePoly(tuple(quot))

    def __floordiv__(self, other: "BivariatePoly") -> "BivariatePoly":
        return self.divmod_exact(other)

    def divides(self, other: "BivariatePoly") -> bool:
        try:
            other.divmod_exact(self)
        except PolynomialDivisionError:
            return False
        return True

    # evaluation

    def evaluate(self, x: Number, y: Number) -> Number:
        d = self.degree
        total = 0
        x_pow = 1
        y_pows = [1] * (d + 1)
        for k in range(1, d + 1):
            y_pows[k] = y_pows[k - 1] * y
        for i, c in enumerate(self.coeffs):
            if c:
                total += c * x_pow * y_pows[d - i]
            x_pow *= x
        return total

    __call__ = evaluate

    def substitute(self, x_form: "BivariatePoly", y_form: "BivariatePoly") -> "BivariatePoly":
        """Compose with forms X -> x_form, Y -> y_form of equal degree."""
        if self.is_zero():
            return BivariatePoly.zero()
        total = BivariatePoly.zero()
        d = self.degree
        for i, c in enumerate(self.coeffs):
            if c:
                total = total + (x_form ** i) * (y_form ** (d - i)) * c
        return total

    def dehomogenize_y(self) -> Tuple[int, ...]:
        """Coefficients of P(1, Y) in decreasing powers of Y."""
        return self.coeffs

    # text form

    def format(self, variables: Tuple[str, str] = ("X", "Y")) -> str:
        return format_poly(self, variables)

    def __str__(self):
        return self.format()

    def __repr__(self):
        return f"<BivariatePoly(degree={self.degree}, {self.format()})>"


def _monomial_text(i: int, j: int, variables: Tuple[str, str]) -> str:
    parts = []
    for var, power in zip(variables, (i, j)):
        if power == 1:
            parts.append(var)
        elif power > 1:
            parts.append(f"{var}^{power}")
    return " ".join(parts)


def format_poly(poly: BivariatePoly, variables: Tuple[str, str] = ("X", "Y")) -> str:
    """Canonical text: terms in decreasing X-degree, explicit signs."""
    if poly.is_zero():
        return "0"
    d = poly.degree
    out = []
    for i in range(d, -1, -1):
        c = poly.coeffs[i]
        if not c:
            continue
        mono = _monomial_text(i, d - i, variables)
        mag = abs(c)
        body = mono if (mag == 1 and mono) else (f"{mag} {mono}" if mono else str(mag))
        if not out:
            out.append(f"-{body}" if c < 0 else body)
        else:
            out.append(f"{'-' if c < 0 else '+'} {body}")
    return " ".join(out)


_TERM_RE = re.compile(r"[+-]?[^+-]+")
_FACTOR_RE = re.compile(r"([A-Za-z])(?:\^(\d+))?")


def parse_poly(text: str, variables: Tuple[str, str] = ("X", "Y"),
               degree: Optional[int] = None) -> BivariatePoly:
    """Parse the canonical text form (also tolerates '*' and TeX braces)."""
    compact = re.sub(r"[\s*{}]", "", text)
    if compact in ("", "0", "+0", "-0"):
        return BivariatePoly.zero()
    terms = {}
    form_degree = degree
    for raw in _TERM_RE.findall(compact):
        sign = -1 if raw.startswith("-") else 1
        body = raw.lstrip("+-")
        m = re.match(r"(\d*)(.*)$", body)
        digits, rest = m.group(1), m.group(2)
        coeff = int(digits) if digits else 1
        powers = {variables[0]: 0, variables[1]: 0}
        pos = 0
        while pos < len(rest):
            fm = _FACTOR_RE.match(rest, pos)
            if not fm or fm.group(1) not in powers:
                raise PolynomialParseError(f"unexpected text {rest[pos:]!r} in term {raw!r}")
            powers[fm.group(1)] += int(fm.group(2) or 1)
            pos = fm.end()
        i, j = powers[variables[0]], powers[variables[1]]
        if form_degree is None:
            form_degree = i + j
        elif i + j != form_degree:
            raise PolynomialParseError(f"term {raw!r} breaks homogeneity (degree {form_degree})")
        terms[i] = terms.get(i, 0) + sign * coeff
    coeffs = [0] * (form_degree + 1)
    for i, c in terms.items():
        coeffs[i] = c
    return BivariatePoly(tuple(coeffs))


def forms_equal(a: BivariatePoly, b: BivariatePoly) -> bool:
    if a.is_zero() or b.is_zero():
        return a.is_zero() and b.is_zero()
    return a.coeffs == b.coeffs


def product(forms: Iterable[BivariatePoly]) -> BivariatePoly:
    result = BivariatePoly.one()
    for f in forms:
        result = result * f
    return result
