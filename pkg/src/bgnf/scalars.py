"""Exact coefficient arithmetic for the polynomial engine.

Three coefficient fields are supported:

  * the rationals, represented by ``fractions.Fraction``;
  * a real quadratic extension Q(sqrt(d)) for a fixed square-free d > 1,
    represented by :class:`QuadExt` as the pair a + b*sqrt(d);
  * arbitrary-precision binary floats (``mpmath.mpf``), used only on the
    numeric fallback paths.  The working precision is taken from the
    ``BGNF_PRECISION`` environment variable (bits of mantissa, default 64).

Arithmetic inside one field is exact for the two exact variants.  Rationals
embed silently into any Q(sqrt(d)); every other cross-field combination is
rejected unless an explicit promotion (exact -> float) is requested, so a
tolerance can never sneak into an exact computation by accident.

Complex coefficients are pairs of field elements wrapped in :class:`CC`.
"""

from __future__ import annotations

import math
import os
import re as _re
from dataclasses import dataclass
from fractions import Fraction

import mpmath

__all__ = [
    "Field",
    "RATIONAL",
    "QuadExt",
    "CC",
    "FieldError",
    "default_float_precision",
    "quad_field",
    "float_field",
    "square_free_core",
    "sqrt_in_field",
]


class FieldError(TypeError):
    """Raised on mixed-field arithmetic or on an unrepresentable element."""


def default_float_precision() -> int:
    """Mantissa bits for the float field, from BGNF_PRECISION (default 64)."""
    try:
        return max(24, int(os.environ.get("BGNF_PRECISION", "64")))
    except ValueError:
        return 64


def square_free_core(n: int) -> int:
    """Largest square-free divisor of ``n`` (n > 0)."""
    if n <= 0:
        raise ValueError("square_free_core needs a positive integer")
    core = 1
    p = 2
    while p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            if e % 2:
                core *= p
        p += 1 if p == 2 else 2
    return core * n


class QuadExt:
    """An element a + b*sqrt(d) of Q(sqrt(d)), d square-free, d > 1.

    Division rationalizes the denominator eagerly so that the (a, b)
    representation is unique.  Rationals and integers mix freely (they embed
    as b = 0); elements of different quadratic fields do not.
    """

    __slots__ = ("a", "b", "d")

    def __init__(self, a, b=0, d=None):
        if d is None or d <= 1:
            raise ValueError("QuadExt needs a square-free d > 1")
        self.a = Fraction(a)
        self.b = Fraction(b)
        self.d = d

    # -- helpers -----------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, QuadExt):
            if other.d != self.d:
                raise FieldError(
                    f"cannot mix Q(sqrt({self.d})) with Q(sqrt({other.d}))"
                )
            return other
        if isinstance(other, (int, Fraction)):
            return QuadExt(other, 0, self.d)
        return None

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadExt(self.a + o.a, self.b + o.b, self.d)

    __radd__ = __add__

    def __neg__(self):
        return QuadExt(-self.a, -self.b, self.d)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadExt(self.a - o.a, self.b - o.b, self.d)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadExt(o.a - self.a, o.b - self.b, self.d)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadExt(
            self.a * o.a + self.b * o.b * self.d,
            self.a * o.b + self.b * o.a,
            self.d,
        )

    __rmul__ = __mul__

    def inverse(self):
        n = self.a * self.a - self.b * self.b * self.d
        if n == 0:
            raise ZeroDivisionError("division by zero in Q(sqrt(d))")
        return QuadExt(self.a / n, -self.b / n, self.d)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = QuadExt(1, 0, self.d)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    # -- predicates --------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, QuadExt):
            return self.d == other.d and self.a == other.a and self.b == other.b
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and self.a == other
        return NotImplemented

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.d))

    def sign(self) -> int:
        """Exact sign of a + b*sqrt(d)."""
        a, b = self.a, self.b
        if b == 0:
            return 0 if a == 0 else (1 if a > 0 else -1)
        if a == 0:
            return 1 if b > 0 else -1
        sa = 1 if a > 0 else -1
        sb = 1 if b > 0 else -1
        if sa == sb:
            return sa
        # opposite signs: compare a^2 against b^2 d (equality impossible,
        # d square-free)
        return sa if a * a > b * b * self.d else sb

    def is_rational(self) -> bool:
        return self.b == 0

    def __lt__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self - o).sign() < 0

    def __gt__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self - o).sign() > 0

    def __abs__(self):
        return self if self.sign() >= 0 else -self

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(self.d)

    def __repr__(self):
        return f"QuadExt({self.a}, {self.b}, d={self.d})"


@dataclass(frozen=True)
class Field:
    """Coefficient-field descriptor attached to every polynomial."""

    kind: str  # "rational" | "quadratic" | "float"
    d: int | None = None
    prec: int | None = None

    def __post_init__(self):
        if self.kind not in ("rational", "quadratic", "float"):
            raise ValueError(f"unknown field kind {self.kind!r}")
        if self.kind == "quadratic" and (self.d is None or self.d <= 1):
            raise ValueError("quadratic field needs square-free d > 1")

    # -- element construction ---------------------------------------------

    def zero(self):
        return self.coerce(0)

    def one(self):
        return self.coerce(1)

    def coerce(self, x):
        """Coerce ``x`` into this field; raise FieldError when impossible."""
        if self.kind == "rational":
            if isinstance(x, (int, Fraction)):
                return Fraction(x)
            if isinstance(x, QuadExt) and x.is_rational():
                return x.a
            raise FieldError(f"cannot coerce {x!r} into the rationals")
        if self.kind == "quadratic":
            if isinstance(x, (int, Fraction)):
                return QuadExt(x, 0, self.d)
            if isinstance(x, QuadExt):
                if x.d == self.d:
                    return x
                if x.is_rational():
                    return QuadExt(x.a, 0, self.d)
                raise FieldError(f"element of Q(sqrt({x.d})) not in Q(sqrt({self.d}))")
            raise FieldError(f"cannot coerce {x!r} into Q(sqrt({self.d}))")
        # float field
        if isinstance(x, (int, float, Fraction)):
            with mpmath.workprec(self.prec):
                return mpmath.mpf(x) if not isinstance(x, Fraction) else (
                    mpmath.mpf(x.numerator) / x.denominator
                )
        if isinstance(x, mpmath.mpf):
            return x
        if isinstance(x, QuadExt):
            with mpmath.workprec(self.prec):
                return (
                    mpmath.mpf(x.a.numerator) / x.a.denominator
                    + (mpmath.mpf(x.b.numerator) / x.b.denominator)
                    * mpmath.sqrt(x.d)
                )
        raise FieldError(f"cannot coerce {x!r} into the float field")

    def contains(self, x) -> bool:
        try:
            self.coerce(x)
            return True
        except FieldError:
            return False

    # -- promotion lattice --------------------------------------------------

    def join(self, other: "Field") -> "Field":
        """Common field of two operands; exact/float mixes are rejected."""
        if self == other:
            return self
        kinds = {self.kind, other.kind}
        if kinds == {"rational", "quadratic"}:
            return self if self.kind == "quadratic" else other
        if "float" in kinds and kinds != {"float"}:
            raise FieldError(
                "mixing exact and float coefficients requires an explicit "
                "promotion (use .to_float())"
            )
        if self.kind == "quadratic" and other.kind == "quadratic":
            raise FieldError(
                f"cannot mix Q(sqrt({self.d})) with Q(sqrt({other.d}))"
            )
        if self.kind == "float" and other.kind == "float":
            return self if self.prec >= other.prec else other
        raise FieldError(f"incompatible fields {self} and {other}")

    # -- text format --------------------------------------------------------

    def format_tag(self) -> str:
        if self.kind == "rational":
            return "rational"
        if self.kind == "quadratic":
            return f"quadratic(d={self.d})"
        return "float"

    def format_elem(self, x) -> str:
        if self.kind == "rational":
            return str(Fraction(x))
        if self.kind == "quadratic":
            q = self.coerce(x)
            if q.b == 0:
                return str(q.a)
            return f"({q.a}{'+' if q.b >= 0 else ''}{q.b}*sqrt({q.d}))"
        return repr(float(x))

    def parse_elem(self, s: str):
        s = s.strip()
        if self.kind == "rational":
            return Fraction(s)
        if self.kind == "quadratic":
            if s.startswith("(") and s.endswith(")"):
                body = s[1:-1]
                m = _re.fullmatch(
                    r"(?P<a>[+-]?\d+(?:/\d+)?)"
                    r"(?P<b>[+-]\d+(?:/\d+)?)\*sqrt\((?P<d>\d+)\)",
                    body,
                )
                if not m:
                    raise ValueError(f"bad quadratic scalar {s!r}")
                if int(m.group("d")) != self.d:
                    raise ValueError(f"scalar {s!r} not in Q(sqrt({self.d}))")
                return QuadExt(Fraction(m.group("a")), Fraction(m.group("b")), self.d)
            return QuadExt(Fraction(s), 0, self.d)
        with mpmath.workprec(self.prec):
            return mpmath.mpf(float(s))


RATIONAL = Field("rational")


def quad_field(d: int) -> Field:
    """Q(sqrt(d)); ``d`` is reduced to its square-free core first."""
    core = square_free_core(d)
    if core <= 1:
        return RATIONAL
    return Field("quadratic", d=core)


def float_field(prec: int | None = None) -> Field:
    return Field("float", prec=prec or default_float_precision())


def sqrt_in_field(x, field: Field):
    """Exact square root of a field element, or None when it has none."""
    if field.kind == "float":
        with mpmath.workprec(field.prec):
            return mpmath.sqrt(field.coerce(x))
    x = field.coerce(x)
    if field.kind == "quadratic":
        q = x
        if q.b == 0:
            r = _rational_sqrt(q.a)
            if r is not None:
                return QuadExt(r, 0, field.d)
            # sqrt(a) = b*sqrt(d) iff a/d is a rational square
            r = _rational_sqrt(q.a / field.d)
            if r is not None:
                return QuadExt(0, r, field.d)
            return None
        # general a + b sqrt(d): try (p + q sqrt(d))^2 form
        # p^2 + q^2 d = a, 2 p q = b  ->  p^2 solves t^2 - a t + b^2 d/4 = 0
        disc = q.a * q.a - q.b * q.b * field.d
        s = _rational_sqrt(disc)
        if s is None:
            return None
        for t in ((q.a + s) / 2, (q.a - s) / 2):
            p = _rational_sqrt(t)
            if p is not None and p != 0:
                cand = QuadExt(p, q.b / (2 * p), field.d)
                if cand * cand == q and cand.sign() >= 0:
                    return cand
        return None
    r = _rational_sqrt(x)
    return r


def _rational_sqrt(x: Fraction):
    """Exact sqrt of a non-negative rational, or None."""
    x = Fraction(x)
    if x < 0:
        return None
    if x == 0:
        return Fraction(0)
    n = math.isqrt(x.numerator)
    d = math.isqrt(x.denominator)
    if n * n == x.numerator and d * d == x.denominator:
        return Fraction(n, d)
    return None


class CC:
    """Complex coefficient: a pair (re, im) of elements of one base field."""

    __slots__ = ("re", "im")

    def __init__(self, re, im=0):
        self.re = re
        self.im = im

    def __add__(self, other):
        if not isinstance(other, CC):
            return CC(self.re + other, self.im)
        return CC(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self):
        return CC(-self.re, -self.im)

    def __sub__(self, other):
        if not isinstance(other, CC):
            return CC(self.re - other, self.im)
        return CC(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, CC):
            return CC(self.re * other, self.im * other)
        a, b, c, d = self.re, self.im, other.re, other.im
        if b == 0:
            if d == 0:
                return CC(a * c, b)
            return CC(a * c, a * d)
        if d == 0:
            return CC(a * c, b * c)
        return CC(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, CC):
            return CC(self.re / other, self.im / other)
        n = other.re * other.re + other.im * other.im
        if n == 0:
            raise ZeroDivisionError("complex division by zero")
        return self * CC(other.re / n, -other.im / n)

    def conj(self):
        return CC(self.re, -self.im)

    def abs2(self):
        """|z|^2 as an exact field element."""
        return self.re * self.re + self.im * self.im

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def is_real(self) -> bool:
        return self.im == 0

    def __eq__(self, other):
        if isinstance(other, CC):
            return self.re == other.re and self.im == other.im
        return self.im == 0 and self.re == other

    def __hash__(self):
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        if self.im == 0:
            return f"CC({self.re})"
        return f"CC({self.re}, {self.im})"


def cc_magnitude(c: CC) -> float:
    """Cheap magnitude proxy |re| + |im| as a float (reporting only)."""
    return abs(float(c.re)) + abs(float(c.im))
