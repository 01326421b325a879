import io
from typing import Dict, Iterator, List, Optional, TextIO, Tuple, Union

import numpy as np

from app.exceptions import EigendataParseError

Source = Union[bytes, str, TextIO]


def _text_lines(source: Source) -> Iterator[Tuple[int, str]]:
    """
    Yield (line_number, stripped line) pairs, dropping '#' comments.

    Args:
        source: Bytes, text, or an open text stream
    """
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    if isinstance(source, str):
        # Normalize line endings (handle Windows \r\n)
        source = io.StringIO(source.replace("\r\n", "\n").replace("\r", "\n"))
    for line_number, raw in enumerate(source, start=1):
        yield line_number, raw.split("#", 1)[0].strip()


def _ints(fields: List[str], line_number: int) -> List[int]:
    try:
        return [int(f) for f in fields]
    except ValueError:
        raise EigendataParseError(line_number, f"expected integers, got {' '.join(fields)!r}") from None


def parse_eigendata_streaming(source: Source) -> Iterator[Dict]:
    """
    Parse the eigenvalue file format as a generator.

    Records look like::

        NEWFORM <level> <label> <degree>
        AP <ell> <c_0> ... <c_(degree-1)> 1

    and are separated by blank lines.

    Yields:
        Dictionary with keys: line_number, level, label, degree, charpolys
    """
    record: Optional[Dict] = None
    for line_number, line in _text_lines(source):
        if not line:
            if record is not None:
                yield record
                record = None
            continue
        fields = line.split()
        tag = fields[0].upper()
        if tag == "NEWFORM":
            if record is not None:
                yield record
            if len(fields) != 4:
                raise EigendataParseError(line_number, "NEWFORM needs <level> <label> <degree>")
            level, degree = _ints([fields[1], fields[3]], line_number)
            record = {
                "line_number": line_number,
                "level": level,
                "label": fields[2],
                "degree": degree,
                "charpolys": {},
            }
        elif tag == "AP":
            if record is None:
                raise EigendataParseError(line_number, "AP line outside a NEWFORM record")
            values = _ints(fields[1:], line_number)
            if len(values) < 2:
                raise EigendataParseError(line_number, "AP needs <ell> and coefficients")
            ell, coeffs = values[0], tuple(values[1:])
            if ell in record["charpolys"]:
                raise EigendataParseError(line_number, f"duplicate AP line for ell={ell}")
            record["charpolys"][ell] = coeffs
        else:
            raise EigendataParseError(line_number, f"unknown record tag {fields[0]!r}")
    if record is not None:
        yield record


def validate_newform_record(record: Dict) -> Tuple[bool, Optional[str], Optional[int]]:
    """
    Validate one parsed NEWFORM record.

    Returns:
        Tuple of (is_valid, error_message, offending ell)
    """
    if record["level"] <= 0:
        return False, f"level must be positive, got {record['level']}", None
    if record["degree"] <= 0:
        return False, f"degree must be positive, got {record['degree']}", None
    for ell, poly in sorted(record["charpolys"].items()):
        if len(poly) != record["degree"] + 1:
            return False, f"charpoly has degree {len(poly) - 1}, expected {record['degree']}", ell
        if poly[-1] != 1:
            return False, "charpoly is not monic", ell
        ok, message = check_ramanujan_bound(poly, ell)
        if not ok:
            return False, message, ell
    return True, None, None


def check_ramanujan_bound(poly: Tuple[int, ...], ell: int) -> Tuple[bool, Optional[str]]:
    """Real roots of a charpoly (ascending coefficients) lie in [-2 sqrt(ell), 2 sqrt(ell)]."""
    if len(poly) == 2:
        root = -poly[0]
        if root * root > 4 * ell:
            return False, f"eigenvalue {root} exceeds 2 sqrt({ell})"
        return True, None
    bound = 2 * np.sqrt(ell) + 1e-6
    for root in np.roots(np.array(poly[::-1], dtype=float)):
        if abs(root.imag) < 1e-6 and abs(root.real) > bound:
            return False, f"eigenvalue {root.real:.6g} exceeds 2 sqrt({ell})"
    return True, None


def parse_curve_file_streaming(source: Source) -> Iterator[Dict]:
    """
    Parse ``CURVE <level> <label> <a1> <a2> <a3> <a4> <a6>`` lines.

    Yields:
        Dictionary with keys: line_number, level, label, a_invariants
    """
    for line_number, line in _text_lines(source):
        if not line:
            continue
        fields = line.split()
        if fields[0].upper() != "CURVE" or len(fields) != 8:
            raise EigendataParseError(
                line_number, "expected CURVE <level> <label> <a1> <a2> <a3> <a4> <a6>"
            )
        numbers = _ints([fields[1]] + fields[3:], line_number)
        yield {
            "line_number": line_number,
            "level": numbers[0],
            "label": fields[2],
            "a_invariants": tuple(numbers[1:]),
        }


def validate_curve_row(row: Dict) -> Tuple[bool, Optional[str]]:
    if row["level"] <= 0:
        return False, "level must be positive"
    if not row["label"]:
        return False, "label is required"
    return True, None
