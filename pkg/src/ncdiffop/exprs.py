"""Parser for operator expressions: sums of tensor words in the named basis
vector fields with rational coefficients.

Grammar (whitespace ignored)::

    expr  := ['+'|'-'] term (('+'|'-') term)*
    term  := coeff ['*' word] | word
    word  := name ('@' name)*
    name  := v1 | v2 | ... (the derived vector-field basis)
    coeff := rational literal like 3, -1/2

``1`` (or any bare coefficient) denotes a multiple of the unit operator.
"""

from __future__ import annotations

import re

from .diffop import GradedOperator
from .geometry import Geometry
from .linalg import kron_vec
from .scalars import ONE, Scalar, ScalarParseError, sc


class UnknownName(ValueError):
    pass


class DegreeExceeded(ValueError):
    pass


class ExprError(ValueError):
    pass


_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[@+*-]))")


def tokenize(text: str):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            if text[pos:].strip():
                raise ExprError(f"cannot tokenize {text[pos:]!r}")
            break
        pos = m.end()
        if m.group("num"):
            out.append(("num", m.group("num")))
        elif m.group("name"):
            out.append(("name", m.group("name")))
        else:
            out.append(("op", m.group("op")))
    return out


def field_basis_names(geometry: Geometry) -> list[str]:
    return [f"v{i + 1}" for i in range(geometry.vec.dim)]


def parse_operator(geometry: Geometry, text: str, truncation: int) -> GradedOperator:
    names = {n: i for i, n in enumerate(field_basis_names(geometry))}
    tokens = tokenize(text)
    if not tokens:
        raise ExprError("empty expression")
    result = GradedOperator(geometry, {}, truncation)
    i = 0
    sign = ONE
    expect_term = True
    while i < len(tokens):
        kind, val = tokens[i]
        if kind == "op" and val in "+-":
            if expect_term and val == "-":
                sign = -sign
                i += 1
                continue
            if expect_term:
                i += 1
                continue
            sign = ONE if val == "+" else -ONE
            expect_term = True
            i += 1
            continue
        coeff = ONE
        word: list[int] = []
        if kind == "num":
            try:
                coeff = sc(val)
            except ScalarParseError as err:
                raise ExprError(str(err)) from None
            i += 1
            if i < len(tokens) and tokens[i] == ("op", "*"):
                i += 1
            if i < len(tokens) and tokens[i][0] == "name":
                kind = "name"
        if i < len(tokens) and tokens[i][0] == "name":
            while i < len(tokens) and tokens[i][0] == "name":
                name = tokens[i][1]
                if name not in names:
                    raise UnknownName(f"unknown vector field {name!r}; basis is {sorted(names)}")
                word.append(names[name])
                i += 1
                if i < len(tokens) and tokens[i] == ("op", "@"):
                    i += 1
                else:
                    break
        degree = len(word)
        if degree > truncation:
            raise DegreeExceeded(f"word of degree {degree} exceeds truncation {truncation}")
        if degree == 0:
            comp = [coeff * sign * x for x in geometry.algebra.unit]
            term = GradedOperator(geometry, {0: comp}, truncation)
        else:
            coords = None
            from .algebra import unit_row

            for idx in reversed(word):
                base = unit_row(geometry.vec.dim, idx)
                if coords is None:
                    coords = base
                    deg = 1
                else:
                    coords = geometry.merge_vec(1, deg).apply(kron_vec(base, coords))
                    deg += 1
            comp = [coeff * sign * x for x in coords]
            term = GradedOperator(geometry, {degree: comp}, truncation)
        result = result + term
        sign = ONE
        expect_term = False
    return result


def parse_element(dim: int, text: str) -> list[Scalar]:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != dim:
        raise ExprError(f"element needs {dim} coordinates, got {len(parts)}")
    try:
        return [sc(p) for p in parts]
    except ScalarParseError as err:
        raise ExprError(str(err)) from None
