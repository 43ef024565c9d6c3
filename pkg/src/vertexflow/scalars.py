"""Exact Gaussian-rational scalars: the coefficient field Q(i).

All arithmetic in the package runs over Q(i) = {a + b*i : a, b rational},
kept exact with ``fractions.Fraction``.  Equality, ordering by (Re, Im) and
the ceiling-of-real-part weight are all decidable.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction

_RAT = r"[+-]?\d+(?:/\d+)?"
_GAUSS_RE = re.compile(
    rf"^\s*(?:(?P<re>{_RAT})\s*(?:(?P<sign>[+-])\s*(?P<im>\d+(?:/\d+)?)\s*i)?"
    rf"|(?P<imonly>{_RAT})\s*i)\s*$"
)


class GaussRational:
    """A complex number with exact rational real and imaginary parts."""

    __slots__ = ("re", "im", "_hash")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", Fraction(re))
        object.__setattr__(self, "im", Fraction(im))
        object.__setattr__(self, "_hash", None)

    @classmethod
    def _raw(cls, re, im):
        """Internal fast path: both arguments must already be Fractions."""
        self = object.__new__(cls)
        object.__setattr__(self, "re", re)
        object.__setattr__(self, "im", im)
        object.__setattr__(self, "_hash", None)
        return self

    def __setattr__(self, name, value):
        raise AttributeError("GaussRational is immutable")

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, GaussRational):
            return GaussRational._raw(self.re + other.re, self.im + other.im)
        if isinstance(other, (int, Fraction)):
            return GaussRational._raw(self.re + other, self.im)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, GaussRational):
            return GaussRational._raw(self.re - other.re, self.im - other.im)
        if isinstance(other, (int, Fraction)):
            return GaussRational._raw(self.re - other, self.im)
        return NotImplemented

    def __rsub__(self, other):
        other = as_gauss(other)
        if other is NotImplemented:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        if isinstance(other, GaussRational):
            return GaussRational._raw(
                self.re * other.re - self.im * other.im,
                self.re * other.im + self.im * other.re,
            )
        if isinstance(other, (int, Fraction)):
            return GaussRational._raw(self.re * other, self.im * other)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = as_gauss(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = as_gauss(other)
        if other is NotImplemented:
            return NotImplemented
        return other * self.inverse()

    def __neg__(self):
        return GaussRational(-self.re, -self.im)

    def __pos__(self):
        return self

    def inverse(self):
        n = self.re * self.re + self.im * self.im
        if n == 0:
            raise ZeroDivisionError("inverse of zero GaussRational")
        return GaussRational(self.re / n, -self.im / n)

    def conjugate(self):
        return GaussRational(self.re, -self.im)

    # -- predicates and ordering --------------------------------------------

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def is_zero(self):
        return not self

    def is_real(self):
        return self.im == 0

    def is_integer(self):
        return self.im == 0 and self.re.denominator == 1

    def key(self):
        """Deterministic sort key: lexicographic on (Re, Im)."""
        return (self.re, self.im)

    def __eq__(self, other):
        other = as_gauss(other)
        if other is NotImplemented:
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        h = self._hash
        if h is None:
            # agree with Fraction/int hashing on the real axis
            h = hash(self.re) if self.im == 0 else hash((self.re, self.im))
            object.__setattr__(self, "_hash", h)
        return h

    def __repr__(self):
        return f"GaussRational({self})"

    def __str__(self):
        return format_gauss(self)


GR_ZERO = GaussRational(0)
GR_ONE = GaussRational(1)
GR_I = GaussRational(0, 1)


def as_gauss(x):
    """Coerce ints, Fractions and GaussRationals; NotImplemented otherwise."""
    if isinstance(x, GaussRational):
        return x
    if isinstance(x, (int, Fraction)):
        return GaussRational(x)
    return NotImplemented


def gauss(re=0, im=0):
    return GaussRational(re, im)


def parse_gauss(text):
    """Parse "p/q", "p/q+r/s i" (spaces optional) or "r/s i" strings."""
    if isinstance(text, int):
        return GaussRational(text)
    m = _GAUSS_RE.match(text)
    if not m:
        raise ValueError(f"cannot parse GaussRational from {text!r}")
    if m.group("imonly") is not None:
        return GaussRational(0, Fraction(m.group("imonly")))
    re_part = Fraction(m.group("re"))
    if m.group("im") is None:
        return GaussRational(re_part)
    im_part = Fraction(m.group("im"))
    if m.group("sign") == "-":
        im_part = -im_part
    return GaussRational(re_part, im_part)


def format_gauss(x):
    x = as_gauss(x)
    if x.im == 0:
        return str(x.re)
    sign = "+" if x.im > 0 else "-"
    return f"{x.re}{sign}{abs(x.im)}i"


def ceil_re(mu):
    """Smallest integer n with n >= Re(mu); the imaginary part is ignored."""
    mu = as_gauss(mu)
    return math.ceil(mu.re)


def gbinom(mu, j):
    """Generalized binomial coefficient mu*(mu-1)*...*(mu-j+1) / j!.

    The top argument may be any Gaussian rational; gbinom(mu, 0) == 1.
    """
    if j < 0:
        raise ValueError("gbinom needs j >= 0")
    mu = as_gauss(mu)
    acc = GR_ONE
    for t in range(j):
        acc = acc * (mu - t)
    return acc * GaussRational(Fraction(1, math.factorial(j)))
