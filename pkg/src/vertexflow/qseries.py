"""Truncated formal q-series with Gaussian-rational exponents.

A series is ``q**offset * sum_e c_e q**e`` with exponents ``e`` and
coefficients ``c_e`` in Q(i).  ``order`` bounds Re(e) for the stored
(offset-relative) exponents: every true term with Re(e) <= order is present
exactly, and nothing above the bound is kept.  Everything is formal; a series
is never evaluated at a point.
"""

from __future__ import annotations

from fractions import Fraction

from .scalars import GR_ZERO, GaussRational, as_gauss, format_gauss


class QSeries:
    __slots__ = ("terms", "order", "offset")

    def __init__(self, terms=None, order=Fraction(0), offset=GR_ZERO):
        offset = as_gauss(offset)
        order = Fraction(order)
        clean = {}
        if terms:
            for e, c in terms.items():
                e = as_gauss(e)
                c = as_gauss(c)
                if c and e.re <= order:
                    clean[e] = c
        object.__setattr__(self, "terms", clean)
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "offset", offset)

    def __setattr__(self, name, value):
        raise AttributeError("QSeries is immutable")

    # -- views ----------------------------------------------------------------

    def items(self):
        """Offset-relative (exponent, coefficient) pairs, (Re, Im)-sorted."""
        return sorted(self.terms.items(), key=lambda t: t[0].key())

    def abs_items(self):
        """Absolute (exponent, coefficient) pairs with the offset folded in."""
        return sorted(
            ((e + self.offset, c) for e, c in self.terms.items()),
            key=lambda t: t[0].key(),
        )

    def coefficient(self, exponent):
        """Coefficient at an absolute exponent."""
        return self.terms.get(as_gauss(exponent) - self.offset, GR_ZERO)

    def exact_bound(self):
        """All true terms with Re(absolute exponent) <= this are present."""
        return self.order + self.offset.re

    def min_abs_re(self):
        if not self.terms:
            return None
        return min(e.re for e in self.terms) + self.offset.re

    def is_zero(self):
        return not self.terms

    # -- arithmetic -------------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, QSeries):
            return NotImplemented
        bound = min(self.exact_bound(), other.exact_bound())
        offset = self.offset
        order = bound - offset.re
        terms = dict(self.terms)
        shift = other.offset - offset
        for e, c in other.terms.items():
            k = e + shift
            acc = terms.get(k, GR_ZERO) + c
            if acc:
                terms[k] = acc
            else:
                terms.pop(k, None)
        return QSeries(terms, order, offset)

    def __neg__(self):
        return QSeries({e: -c for e, c in self.terms.items()}, self.order, self.offset)

    def __sub__(self, other):
        if not isinstance(other, QSeries):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, QSeries):
            return self.scale(other)
        offset = self.offset + other.offset
        ma, mb = self.min_abs_re(), other.min_abs_re()
        if ma is None or mb is None:
            return QSeries({}, min(self.order, other.order), offset)
        bound = min(self.exact_bound() + mb, other.exact_bound() + ma)
        order = bound - offset.re
        terms = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = e1 + e2
                if e.re > order:
                    continue
                acc = terms.get(e, GR_ZERO) + c1 * c2
                if acc:
                    terms[e] = acc
                else:
                    terms.pop(e, None)
        return QSeries(terms, order, offset)

    def scale(self, scalar):
        scalar = as_gauss(scalar)
        if scalar is NotImplemented:
            return NotImplemented
        if not scalar:
            return QSeries({}, self.order, self.offset)
        return QSeries(
            {e: c * scalar for e, c in self.terms.items()}, self.order, self.offset
        )

    __rmul__ = __mul__

    def truncate(self, order):
        """Drop terms with Re(relative exponent) > order."""
        order = Fraction(order)
        return QSeries(self.terms, min(self.order, order), self.offset)

    def equal_up_to(self, other, order=None):
        """Exact term-by-term equality of absolute exponents up to a Re bound.

        ``order`` is a bound on Re of the absolute exponent; defaults to the
        common guaranteed-exact region of the two operands.
        """
        bound = min(self.exact_bound(), other.exact_bound())
        if order is not None:
            bound = min(bound, Fraction(order))
        mine = {e: c for e, c in self.abs_items() if e.re <= bound}
        theirs = {e: c for e, c in other.abs_items() if e.re <= bound}
        return mine == theirs

    def __eq__(self, other):
        if not isinstance(other, QSeries):
            return NotImplemented
        return (
            dict(self.abs_items()) == dict(other.abs_items())
            and self.exact_bound() == other.exact_bound()
        )

    def __hash__(self):
        return hash((tuple(self.abs_items()), self.exact_bound()))

    # -- serialization ------------------------------------------------------------

    def to_json_obj(self):
        """Deterministic list of records with the offset folded in."""
        return [
            {
                "re_exp": str(e.re),
                "im_exp": str(e.im),
                "re_coeff": str(c.re),
                "im_coeff": str(c.im),
            }
            for e, c in self.abs_items()
        ]

    def __repr__(self):
        parts = [f"{format_gauss(c)}*q^({format_gauss(e)})" for e, c in self.abs_items()]
        body = " + ".join(parts) if parts else "0"
        return f"QSeries({body}; order<={self.order})"


def qseries_one(order):
    return QSeries({GaussRational(0): GaussRational(1)}, Fraction(order))


def geometric_inverse_power(m, k, order):
    """(1 - q^m)^(-k) truncated at the given order; integer coefficients."""
    order = Fraction(order)
    out = {0: 1}
    # repeated convolution with 1/(1-q^m) = sum_t q^(m t)
    for _ in range(k):
        acc = {}
        for e, c in out.items():
            t = 0
            while e + m * t <= order:
                acc[e + m * t] = acc.get(e + m * t, 0) + c
                t += 1
        out = acc
    return QSeries(
        {GaussRational(e): GaussRational(c) for e, c in out.items()}, order
    )
