from hypothesis import given
from hypothesis import strategies as st

from voacert.scalars import (ONE, Q, ZERO, binomial, rat_from_str, rat_to_str,
                             rational)


def test_rational_constructors():
    assert rational(3) == Q(3)
    assert rational("3/4") == Q(3, 4)
    assert rational(Q(5, 7)) == Q(5, 7)
    assert ZERO == Q(0) and ONE == Q(1)


def test_string_round_trip():
    for s in ["0", "1", "-1", "3/4", "-22/7", "100000000000/3"]:
        assert rat_to_str(rat_from_str(s)) == s


@given(st.integers(-10 ** 6, 10 ** 6), st.integers(1, 10 ** 6))
def test_string_round_trip_random(p, q):
    x = Q(p, q)
    assert rat_from_str(rat_to_str(x)) == x


def test_binomial_small_values():
    assert binomial(4, 2) == 6
    assert binomial(5, 0) == 1
    assert binomial(3, 5) == 0
    assert binomial(0, 0) == 1


def test_binomial_negative_top():
    # C(-1, j) = (-1)^j and C(-2, j) = (-1)^j (j+1)
    for j in range(6):
        assert binomial(-1, j) == (-1) ** j
        assert binomial(-2, j) == (-1) ** j * (j + 1)


@given(st.integers(-8, 8), st.integers(1, 10))
def test_binomial_pascal_rule(top, j):
    assert binomial(top, j) == binomial(top - 1, j) + binomial(top - 1, j - 1)
