from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from vertexflow.scalars import (
    GaussRational,
    ceil_re,
    format_gauss,
    gauss,
    gbinom,
    parse_gauss,
)

def small_fractions():
    return st.builds(
        Fraction,
        st.integers(min_value=-50, max_value=50),
        st.integers(min_value=1, max_value=12),
    )


def gaussians():
    return st.builds(GaussRational, small_fractions(), small_fractions())


def falling_factorial_oracle(mu, j):
    # independent oracle: literal product mu (mu-1) ... (mu-j+1) / j!
    num = gauss(1)
    for t in range(j):
        num = num * (mu - t)
    den = 1
    for t in range(1, j + 1):
        den *= t
    return num * gauss(Fraction(1, den))


def test_gbinom_empty_product():
    assert gbinom(gauss(Fraction(7, 3), Fraction(-2, 5)), 0) == gauss(1)


def test_gbinom_ordinary():
    assert gbinom(3, 2) == gauss(3)


def test_gbinom_complex_top():
    # (1/2 + i)(-1/2 + i)/2, frozen from the falling-factorial oracle
    mu = gauss(Fraction(1, 2), 1)
    expected = falling_factorial_oracle(mu, 2)
    assert expected == gauss(Fraction(-5, 8))
    assert gbinom(mu, 2) == expected


def test_ceil_re_examples():
    assert ceil_re(gauss(2)) == 2
    assert ceil_re(gauss(Fraction(3, 2), 1)) == 2
    assert ceil_re(gauss(Fraction(-1, 2))) == 0


@given(gaussians(), gaussians(), gaussians())
def test_field_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + b == b + a
    assert a * b == b * a


@given(gaussians())
def test_inverse(a):
    if a.is_zero():
        with pytest.raises(ZeroDivisionError):
            a.inverse()
    else:
        assert a * a.inverse() == gauss(1)


@given(gaussians(), st.integers(min_value=0, max_value=10))
def test_gbinom_pascal(mu, j):
    lhs = gbinom(mu, j)
    rhs = gbinom(mu - 1, j) + (gbinom(mu - 1, j - 1) if j else gauss(0))
    if j == 0:
        rhs = gbinom(mu - 1, 0)
    assert lhs == rhs


@given(gaussians())
def test_ceil_re_shift(mu):
    assert ceil_re(mu + 1) == ceil_re(mu) + 1


@given(gaussians())
def test_parse_format_roundtrip(a):
    assert parse_gauss(format_gauss(a)) == a


def test_parse_variants():
    assert parse_gauss("1/2") == gauss(Fraction(1, 2))
    assert parse_gauss("1/2+1/3 i") == gauss(Fraction(1, 2), Fraction(1, 3))
    assert parse_gauss("1/2 - 1/3 i") == gauss(Fraction(1, 2), Fraction(-1, 3))
    assert parse_gauss("-2/3i") == gauss(0, Fraction(-2, 3))
    with pytest.raises(ValueError):
        parse_gauss("one half")
