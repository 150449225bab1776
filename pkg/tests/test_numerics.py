import math

import gmpy2
import pytest
from gmpy2 import mpc, mpfr
from hypothesis import given, settings
from hypothesis import strategies as st

from cwlab.errors import PrecisionMismatchError
from cwlab.numerics import (Precision, bigc, precision_of, principal_sqrt, required_precision,
                            stable_sum, to_complex, workprec)


def test_precision_floor():
    with pytest.raises(ValueError):
        Precision(29)
    assert Precision(30).bits == math.ceil(30 * math.log2(10))
    assert Precision(40).plus(20).decimal_digits == 60


@pytest.mark.parametrize("beta,n,digits", [
    (0, 100, 30),
    (1, 100, math.ceil(100 / (2 * math.log(10))) + 30),
    (1.349 + 4j, 400, 148),
])
def test_required_precision_examples(beta, n, digits):
    assert required_precision(beta, n).decimal_digits == digits


def test_stable_sum_empty_and_cancel():
    assert stable_sum([]) == 0
    with workprec(40):
        x = mpc("1.2345678901234567890123-3.1j")
        assert stable_sum([x, -x]) == 0


def test_stable_sum_large_cancellation():
    with workprec(45):
        terms = [mpc(mpfr(10) ** 40), mpc(1), mpc(-(mpfr(10) ** 40))]
        assert stable_sum(terms) == 1


def test_stable_sum_rejects_mixed_precision():
    with workprec(40):
        a = mpc(1)
    with workprec(80):
        b = mpc(2)
    with pytest.raises(PrecisionMismatchError):
        stable_sum([a, b])


@pytest.mark.parametrize("z,expected", [(1, 1), (-4, 2j), (2j, 1 + 1j)])
def test_principal_sqrt_examples(z, expected):
    with workprec(40):
        r = principal_sqrt(mpc(z))
    assert abs(to_complex(r) - expected) < 1e-30


@settings(max_examples=60, deadline=None)
@given(st.complex_numbers(max_magnitude=1e6, allow_nan=False, allow_infinity=False))
def test_principal_sqrt_squares_back(z):
    with workprec(50):
        w = principal_sqrt(bigc(z))
        assert w.real >= 0
        assert abs(w * w - bigc(z)) <= mpfr(10) ** -40 * (1 + abs(bigc(z)))


def test_bigc_carries_precision():
    z = bigc(0.5 + 0.25j, Precision(60))
    assert precision_of(z) == Precision(60).bits


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(-1e20, 1e20), max_size=20))
def test_stable_sum_matches_exact_rational(xs):
    from fractions import Fraction

    with workprec(60):
        got = stable_sum([mpc(x) for x in xs])
    exact = sum(Fraction(x) for x in xs)
    assert abs(Fraction(gmpy2.mpq(got.real)) - exact) <= Fraction(1, 10**40) * (1 + sum(abs(Fraction(x)) for x in xs))
