"""Exact coefficient arithmetic.

Every symbolic result in angularft carries a coefficient of the form
``q * i**a * pi**b`` with ``q`` a reduced rational.  The ring is closed under
multiplication; sums are only defined between scalars that share ``(a, b)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import StrEnum
from fractions import Fraction

import numpy as np
from scipy import special

from .errors import DomainError, RingError

Rational = Fraction | int


def double_factorial(k: int) -> int:
    """Return ``k!!`` with ``(-1)!! = 0!! = 1``."""
    if k < -1:
        raise DomainError(f"double factorial undefined for {k}")
    result = 1
    while k > 1:
        result *= k
        k -= 2
    return result


@dataclass(frozen=True, slots=True)
class ExactScalar:
    """A coefficient ``q * i**i_pow * pi**pi_pow``.

    The canonical form keeps ``i_pow`` in ``{0, 1}``; a factor ``i**2`` is
    folded into the sign of ``q``.  Zero is always ``(0, 0, 0)``.
    """

    q: Fraction
    i_pow: int = 0
    pi_pow: int = 0

    def __post_init__(self) -> None:
        q = Fraction(self.q)
        i_pow = self.i_pow % 4
        pi_pow = self.pi_pow
        if i_pow >= 2:
            q = -q
            i_pow -= 2
        if q == 0:
            i_pow = 0
            pi_pow = 0
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "i_pow", i_pow)
        object.__setattr__(self, "pi_pow", pi_pow)

    @classmethod
    def of(cls, q: Rational, i_pow: int = 0, pi_pow: int = 0) -> ExactScalar:
        return cls(Fraction(q), i_pow, pi_pow)

    @property
    def is_zero(self) -> bool:
        return self.q == 0

    def __mul__(self, other: ExactScalar | Rational) -> ExactScalar:
        if not isinstance(other, ExactScalar):
            return ExactScalar(self.q * Fraction(other), self.i_pow, self.pi_pow)
        return ExactScalar(self.q * other.q, self.i_pow + other.i_pow, self.pi_pow + other.pi_pow)

    __rmul__ = __mul__

    def __neg__(self) -> ExactScalar:
        return ExactScalar(-self.q, self.i_pow, self.pi_pow)

    def __add__(self, other: ExactScalar) -> ExactScalar:
        if other.is_zero:
            return self
        if self.is_zero:
            return other
        if (self.i_pow, self.pi_pow) != (other.i_pow, other.pi_pow):
            raise RingError(f"{self.render()} + {other.render()} is not representable in ring")
        return ExactScalar(self.q + other.q, self.i_pow, self.pi_pow)

    def __sub__(self, other: ExactScalar) -> ExactScalar:
        return self + (-other)

    def reciprocal(self) -> ExactScalar:
        if self.is_zero:
            raise ZeroDivisionError("reciprocal of exact zero")
        # i**-a == i**(4 - a), so no sign bookkeeping is needed here
        return ExactScalar(1 / self.q, -self.i_pow, -self.pi_pow)

    def to_complex(self) -> complex:
        return complex(float(self.q)) * (1j**self.i_pow) * math.pi**self.pi_pow

    def to_float(self) -> float:
        """Real value; raises ``RingError`` for imaginary scalars."""
        if self.i_pow and not self.is_zero:
            raise RingError(f"{self.render()} is not real")
        return float(self.q) * math.pi**self.pi_pow

    def render(self) -> str:
        parts = [str(self.q)]
        if self.i_pow:
            parts.append("i")
        if self.pi_pow == 1:
            parts.append("pi")
        elif self.pi_pow:
            parts.append(f"pi^{self.pi_pow}")
        return "*".join(parts)

    def to_json(self) -> dict[str, object]:
        return {"rational": str(self.q), "i_pow": self.i_pow, "pi_pow": self.pi_pow}

    def __str__(self) -> str:
        return self.render()


ZERO = ExactScalar(Fraction(0))
ONE = ExactScalar(Fraction(1))
I = ExactScalar(Fraction(1), 1)
PI = ExactScalar(Fraction(1), 0, 1)


def i_power(k: int) -> ExactScalar:
    return ExactScalar(Fraction(1), k)


def scalar_arith(a: ExactScalar, b: ExactScalar | None, op: str) -> ExactScalar:
    """Apply ``op`` (``"mul"``, ``"add"`` or ``"neg"``) to exact scalars."""
    if op == "neg":
        return -a
    if b is None:
        raise TypeError(f"{op} needs two operands")
    if op == "mul":
        return a * b
    if op == "add":
        return a + b
    raise ValueError(f"unknown scalar operation {op!r}")


def _gamma_half(twice: int) -> tuple[Fraction, int]:
    """Gamma at ``twice / 2`` as ``(rational, sqrt_pi_power)``."""
    if twice % 2 == 0:
        return Fraction(math.factorial(twice // 2 - 1)), 0
    k = (twice - 1) // 2
    return Fraction(math.factorial(2 * k), 4**k * math.factorial(k)), 1


class Region(StrEnum):
    REGULAR = "regular"
    DELTA = "delta"
    OUTSIDE_BELOW = "outside-below"
    OUTSIDE_ABOVE = "outside-above"


def classify(n: int, ell: int) -> Region:
    """Place ``(n, ell)`` relative to the definable strip ``-(ell+3) < n <= ell``."""
    if ell < 0:
        raise DomainError(f"negative angular momentum {ell}")
    if n <= -(ell + 3):
        return Region.OUTSIDE_BELOW
    if n > ell:
        return Region.OUTSIDE_ABOVE
    if n == ell:
        return Region.DELTA
    return Region.REGULAR


def chi(n: int, ell: int) -> ExactScalar:
    """Exact value of the radial integral ``chi_{n ell}``.

    ``2**(n+1) sqrt(pi) Gamma((ell+3+n)/2) / Gamma((ell-n)/2)``; exactly one
    gamma argument is a half-integer so the result is rational times
    ``pi**0`` or ``pi**1``.  At ``n == ell`` the formula vanishes.
    """
    region = classify(n, ell)
    if region in (Region.OUTSIDE_BELOW, Region.OUTSIDE_ABOVE):
        raise DomainError(f"(n={n}, l={ell}) is outside definable region")
    if region is Region.DELTA:
        return ZERO
    num, num_half = _gamma_half(ell + 3 + n)
    den, den_half = _gamma_half(ell - n)
    sqrt_pi_pow = 1 + num_half - den_half
    assert sqrt_pi_pow in (0, 2)
    return ExactScalar(Fraction(2) ** (n + 1) * num / den, 0, sqrt_pi_pow // 2)


def chi_float(n: float, ell: float) -> float:
    """``chi_{n ell}`` for real parameters via log-gamma."""
    if not -(ell + 3) < n < ell:
        raise DomainError(f"(n={n}, l={ell}) is outside definable region")
    log_value = (
        (n + 1) * math.log(2.0)
        + 0.5 * math.log(math.pi)
        + special.gammaln(0.5 * (ell + 3 + n))
        - special.gammaln(0.5 * (ell - n))
    )
    return float(np.exp(log_value))


__all__ = [
    "ExactScalar",
    "I",
    "ONE",
    "PI",
    "Region",
    "ZERO",
    "chi",
    "chi_float",
    "classify",
    "double_factorial",
    "i_power",
    "scalar_arith",
]
