from __future__ import annotations

import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from angularft.errors import DomainError, RingError
from angularft.exact import (
    ONE,
    PI,
    ZERO,
    ExactScalar,
    I,
    Region,
    chi,
    chi_float,
    classify,
    double_factorial,
    scalar_arith,
)


@pytest.mark.parametrize(("k", "expected"), [(-1, 1), (0, 1), (1, 1), (5, 15), (6, 48), (9, 945)])
def test_double_factorial(k: int, expected: int):
    assert double_factorial(k) == expected


def test_double_factorial_rejects_below_minus_one():
    with pytest.raises(DomainError):
        double_factorial(-2)


def test_i_squared_folds_into_sign():
    assert I * I == ExactScalar.of(-1)
    assert (I * I * I) == ExactScalar.of(-1, 1)
    assert ExactScalar.of(1, 4) == ONE


def test_zero_is_canonical():
    assert ExactScalar.of(0, 3, -5) == ZERO
    assert (ExactScalar.of(2, 1, 1) * 0) == ZERO


def test_scalar_arith_examples():
    half_pi = ExactScalar.of(Fraction(1, 2), 0, 1)
    assert scalar_arith(I, I, "mul") == ExactScalar.of(-1)
    assert scalar_arith(half_pi, ExactScalar.of(3, 0, -2), "mul") == ExactScalar.of(Fraction(3, 2), 0, -1)
    assert scalar_arith(half_pi, None, "neg") == ExactScalar.of(Fraction(-1, 2), 0, 1)
    with pytest.raises(RingError, match="not representable in ring"):
        scalar_arith(half_pi, ONE, "add")


def test_add_with_zero_is_always_allowed():
    assert ZERO + PI == PI
    assert PI + ZERO == PI
    assert PI - PI == ZERO


def test_reciprocal_and_float_views():
    value = ExactScalar.of(Fraction(3, 4), 1, -2)
    assert value * value.reciprocal() == ONE
    assert value.to_complex() == pytest.approx(0.75j / math.pi**2)
    with pytest.raises(RingError):
        value.to_float()
    assert PI.to_float() == pytest.approx(math.pi)


def test_render_and_json():
    assert ExactScalar.of(Fraction(1, 4), 1, -1).render() == "1/4*i*pi^-1"
    assert ExactScalar.of(Fraction(-3, 4), 0, -1).render() == "-3/4*pi^-1"
    assert ExactScalar.of(2, 0, 1).render() == "2*pi"
    assert ExactScalar.of(Fraction(1, 2), 0, 1).to_json() == {"rational": "1/2", "i_pow": 0, "pi_pow": 1}


@pytest.mark.parametrize(
    ("n", "ell", "expected"),
    [
        (-2, 0, ExactScalar.of(Fraction(1, 2), 0, 1)),
        (0, 2, ExactScalar.of(Fraction(3, 2), 0, 1)),
        (2, 3, ExactScalar.of(48)),
        (2, 2, ZERO),
        (-3, 1, ExactScalar.of(Fraction(1, 4), 0, 1)),
        (-1, 0, ONE),
        (-1, 1, ExactScalar.of(Fraction(1, 2), 0, 1)),
    ],
)
def test_chi_values(n: int, ell: int, expected: ExactScalar):
    assert chi(n, ell) == expected


@pytest.mark.parametrize("k", range(1, 7))
def test_chi_closed_families(k: int):
    assert chi(k - 1, k) == ExactScalar.of(2**k * math.factorial(k))
    assert chi(k - 2, k) == ExactScalar.of(Fraction(double_factorial(2 * k - 1), 2), 0, 1)
    assert chi(k, k) == ZERO


@pytest.mark.parametrize(("n", "ell"), [(-3, 0), (1, 0), (-5, 2), (4, 3)])
def test_chi_outside_definable_region(n: int, ell: int):
    with pytest.raises(DomainError, match="outside definable region"):
        chi(n, ell)


def test_chi_reciprocity_grid():
    half_pi = ExactScalar.of(Fraction(1, 2), 0, 1)
    for ell in range(7):
        for n in range(-(ell + 2), ell):
            assert chi(n, ell) * chi(-(n + 3), ell) == half_pi


@given(st.integers(min_value=0, max_value=10), st.data())
def test_chi_is_real_with_small_pi_power(ell: int, data: st.DataObject):
    n = data.draw(st.integers(min_value=-(ell + 2), max_value=ell))
    value = chi(n, ell)
    assert value.i_pow == 0
    assert value.pi_pow in (0, 1)


def test_chi_float_matches_exact():
    for ell in range(11):
        for n in range(-(ell + 2), ell):
            assert chi_float(n, ell) == pytest.approx(chi(n, ell).to_float(), rel=1e-12)


def test_chi_float_real_parameters():
    assert chi_float(-2, 0) == pytest.approx(math.pi / 2, rel=1e-14)
    assert chi_float(-1.5, 0) == pytest.approx(math.sqrt(math.pi / 2), rel=1e-12)
    with pytest.raises(DomainError):
        chi_float(1.0, 1.0)


@pytest.mark.parametrize(
    ("n", "ell", "region"),
    [
        (-2, 0, Region.REGULAR),
        (0, 0, Region.DELTA),
        (-3, 0, Region.OUTSIDE_BELOW),
        (3, 2, Region.OUTSIDE_ABOVE),
    ],
)
def test_classify(n: int, ell: int, region: Region):
    assert classify(n, ell) is region
