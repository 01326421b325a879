"""
Reader for Diophantine fixture files.

One directive per line::

    NAME tm_83_7
    VARIABLES X Y
    FORM -X^3 + 6 X^2 Y - 5 X Y^2 + Y^3
    RHS 1
    PRIMES 83
    SIGNED yes
    COPRIME yes
    THRESHOLD 100
    SOLUTION 5 1 0
    PAIR 31 105

SOLUTION lines carry x, y and one exponent per prime; PAIR lines carry a bare
(x, y) pair. Everything after '#' is a comment.
"""
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from app.exceptions import FixtureError, PolynomialParseError
from app.models.poly import parse_poly
from app.models.thue import TMInstance, TMSolution

_BOOLEANS = {"yes": True, "true": True, "1": True, "no": False, "false": False, "0": False}


@dataclass
class Fixture:
    instance: TMInstance
    solutions: List[TMSolution] = field(default_factory=list)
    pairs: List[Tuple[int, int]] = field(default_factory=list)
    threshold: Optional[int] = None

    @property
    def name(self) -> str:
        return self.instance.name


def _ints(values: List[str], line_number: int) -> List[int]:
    try:
        return [int(v) for v in values]
    except ValueError:
        raise FixtureError(f"line {line_number}: expected integers, got {' '.join(values)!r}") from None


def validate_directives(directives: Dict[str, str]) -> Tuple[bool, Optional[str]]:
    if "FORM" not in directives:
        return False, "FORM is required"
    for key in ("SIGNED", "COPRIME"):
        if key in directives and directives[key].lower() not in _BOOLEANS:
            return False, f"{key} must be yes or no"
    return True, None


def parse_fixture(text: str) -> Fixture:
    directives: Dict[str, str] = {}
    raw_solutions: List[Tuple[int, List[int]]] = []
    pairs: List[Tuple[int, int]] = []
    for line_number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, rest = line.partition(" ")
        key = key.upper()
        rest = rest.strip()
        if key == "SOLUTION":
            raw_solutions.append((line_number, _ints(rest.split(), line_number)))
        elif key == "PAIR":
            values = _ints(rest.split(), line_number)
            if len(values) != 2:
                raise FixtureError(f"line {line_number}: PAIR needs exactly two integers")
            pairs.append((values[0], values[1]))
        elif key in ("NAME", "VARIABLES", "FORM", "RHS", "PRIMES", "SIGNED", "COPRIME", "THRESHOLD"):
            if key in directives:
                raise FixtureError(f"line {line_number}: duplicate {key}")
            directives[key] = rest
        else:
            raise FixtureError(f"line {line_number}: unknown directive {key!r}")

    is_valid, error = validate_directives(directives)
    if not is_valid:
        raise FixtureError(error)

    variables = tuple(directives.get("VARIABLES", "X Y").split())
    if len(variables) != 2:
        raise FixtureError("VARIABLES needs exactly two names")
    try:
        form = parse_poly(directives["FORM"], variables)
    except PolynomialParseError as e:
        raise FixtureError(f"FORM: {e}") from e
    primes = tuple(_ints(directives.get("PRIMES", "").split(), 0))
    instance = TMInstance(
        form=form,
        b=_ints([directives.get("RHS", "1")], 0)[0],
        primes=primes,
        coprime=_BOOLEANS[directives.get("COPRIME", "yes").lower()],
        signed=_BOOLEANS[directives.get("SIGNED", "yes").lower()],
        name=directives.get("NAME", ""),
    )

    solutions = []
    for line_number, values in raw_solutions:
        if len(values) != 2 + len(primes):
            raise FixtureError(
                f"line {line_number}: SOLUTION needs x, y and {len(primes)} exponent(s)"
            )
        solutions.append(TMSolution(values[0], values[1], tuple(values[2:])))
    threshold = _ints([directives["THRESHOLD"]], 0)[0] if "THRESHOLD" in directives else None
    return Fixture(instance=instance, solutions=solutions, pairs=pairs, threshold=threshold)


def load_fixture(path: Union[str, Path]) -> Fixture:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise FixtureError(f"cannot read fixture {path}: {e}") from e
    return parse_fixture(text)
