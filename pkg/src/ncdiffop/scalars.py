"""Exact field elements: rationals, optionally with an adjoined imaginary unit.

All arithmetic in this package is exact.  A ``Scalar`` is a Gaussian rational
``re + im*i`` whose parts are arbitrary-precision rationals (gmpy2 ``mpq`` when
available, ``fractions.Fraction`` otherwise).  Conjugation flips the sign of
the imaginary part, so on the rational subfield it is the identity.
"""

from __future__ import annotations

import re as _re

try:
    from gmpy2 import mpq as _mpq
except ImportError:  # pragma: no cover - gmpy2 is a declared dependency
    from fractions import Fraction as _mpq

_RAT_ZERO = _mpq(0)
_RAT_ONE = _mpq(1)

_RAT_RE = _re.compile(r"^[+-]?\d+(?:/\d+)?$")


class ScalarParseError(ValueError):
    pass


def _parse_rat(text: str):
    text = text.lstrip("+")
    if not _RAT_RE.match(text):
        raise ScalarParseError(f"bad rational {text!r}")
    return _mpq(text)


class Scalar:
    """An exact Gaussian rational with involutive conjugation."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if type(re) is type(_RAT_ZERO) else _mpq(re)
        self.im = im if type(im) is type(_RAT_ZERO) else _mpq(im)

    # -- constructors ------------------------------------------------------

    @staticmethod
    def from_str(text: str) -> "Scalar":
        s = "".join(text.split())
        if not s:
            raise ScalarParseError("empty scalar")
        if s[-1] in "iI":
            body = s[:-1]
            # split off a real part at the last top-level sign (not at index 0)
            idx = max(body.rfind("+", 1), body.rfind("-", 1))
            if idx == -1:
                re_txt, im_txt = "", body
            else:
                re_txt, im_txt = body[:idx], body[idx:]
            if im_txt in ("", "+"):
                im_val = _RAT_ONE
            elif im_txt == "-":
                im_val = -_RAT_ONE
            else:
                im_val = _parse_rat(im_txt)
            re_val = _parse_rat(re_txt) if re_txt else _RAT_ZERO
            return Scalar(re_val, im_val)
        return Scalar(_parse_rat(s))

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        other = _coerce(other)
        return Scalar(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        return Scalar(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        other = _coerce(other)
        a, b, c, d = self.re, self.im, other.re, other.im
        if b or d:
            return Scalar(a * c - b * d, a * d + b * c)
        return Scalar(a * c)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        c, d = other.re, other.im
        if not c and not d:
            raise ZeroDivisionError("scalar division by zero")
        if not d:
            return Scalar(self.re / c, self.im / c)
        n = c * c + d * d
        a, b = self.re, self.im
        return Scalar((a * c + b * d) / n, (b * c - a * d) / n)

    def __rtruediv__(self, other):
        return _coerce(other) / self

    def __neg__(self):
        return Scalar(-self.re, -self.im)

    def conj(self) -> "Scalar":
        if self.im:
            return Scalar(self.re, -self.im)
        return self

    def inv(self) -> "Scalar":
        return ONE / self

    # -- predicates & hashing ---------------------------------------------

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def is_real(self) -> bool:
        return not self.im

    def is_rational_nonneg(self) -> bool:
        return not self.im and self.re >= 0

    def __eq__(self, other):
        if not isinstance(other, (Scalar, int)):
            return NotImplemented
        other = _coerce(other)
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    # -- formatting --------------------------------------------------------

    def __str__(self):
        if not self.im:
            return str(self.re)
        im_txt = str(self.im)
        if not self.re:
            return f"{im_txt}i"
        if im_txt.startswith("-"):
            return f"{self.re}{im_txt}i"
        return f"{self.re}+{im_txt}i"

    def __repr__(self):
        return f"Scalar({self})"


def _coerce(x) -> Scalar:
    if isinstance(x, Scalar):
        return x
    return Scalar(x)


ZERO = Scalar(0)
ONE = Scalar(1)
I = Scalar(0, 1)


def sc(x) -> Scalar:
    """Coerce an int, rational, string or Scalar into a Scalar."""
    if isinstance(x, Scalar):
        return x
    if isinstance(x, str):
        return Scalar.from_str(x)
    return Scalar(x)
