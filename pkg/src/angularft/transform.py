"""Symbolic three-dimensional Fourier transforms of ``p**n`` times angular
monomials, and the derivative identities that follow from them.

Conventions: ``Psi(r) = int d^3p/(2 pi)^3 exp(i p.r) Phi(p)``.  Each angular
component of definite ``ell`` transforms on its own:

* ``-(ell+3) < n < ell``: ``p**n -> (i**ell / 2 pi**2) chi_{n ell} r**-(n+3)``
* ``n == ell``: ``p**ell -> i**ell (2 ell + 1)!! r**-ell delta3``
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from enum import StrEnum
from fractions import Fraction
from typing import ClassVar, Self

from .errors import DomainError, UnsupportedShapeError
from .exact import ONE, ZERO, ExactScalar, Region, chi, classify, double_factorial, i_power
from .tensor import (
    L_MAX,
    IndexName,
    Side,
    TensorExpr,
    TensorTerm,
    components,
    contract,
    default_indices,
    hat_monomial,
    kronecker,
    traceless_top,
)

SUPPORTED_ROWS = (
    "r^n * (angular, l) with -(l+3) < n < l",
    "r^l * (angular, l)",
    "r^-l * delta3 * (angular, l)",
)


@dataclass(frozen=True, slots=True)
class ExpansionTerm:
    """``coeff * s**power [* delta] * angular`` with ``s`` = r or p."""

    coeff: ExactScalar
    power: int
    delta: bool
    angular: TensorExpr


@dataclass(frozen=True, slots=True)
class PositionTerm(ExpansionTerm):
    @property
    def r_pow(self) -> int:
        return self.power

    @property
    def delta3(self) -> bool:
        return self.delta


@dataclass(frozen=True, slots=True)
class MomentumTerm(ExpansionTerm):
    @property
    def p_pow(self) -> int:
        return self.power

    @property
    def delta3p(self) -> bool:
        return self.delta


ExpandedKey = tuple[int, bool, TensorTerm]


@dataclass(frozen=True, slots=True)
class _Expansion:
    """Canonical sum of expansion terms.

    Angular parts are stored monic (leading tensor coefficient one, scale
    folded into the exact coefficient) so that terms differing only by a
    rational factor merge.
    """

    terms: tuple[ExpansionTerm, ...] = ()

    term_type: ClassVar[type[ExpansionTerm]] = ExpansionTerm
    side: ClassVar[Side] = Side.POSITION
    power_symbol: ClassVar[str] = "s"
    delta_symbol: ClassVar[str] = "delta"
    power_field: ClassVar[str] = "power"
    delta_field: ClassVar[str] = "delta"

    @classmethod
    def build(cls, terms: Iterable[ExpansionTerm]) -> Self:
        merged: dict[tuple[int, bool, TensorExpr], ExactScalar] = {}
        for term in terms:
            if term.coeff.is_zero or term.angular.is_zero:
                continue
            lead, angular = term.angular.with_side(cls.side).monic()
            key = (term.power, term.delta, angular)
            merged[key] = merged.get(key, ZERO) + term.coeff * lead
        kept = [
            cls.term_type(coeff, power, delta, angular)
            for (power, delta, angular), coeff in merged.items()
            if not coeff.is_zero
        ]
        kept.sort(key=lambda t: (t.delta, t.power, t.angular.sort_key()))
        return cls(tuple(kept))

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: Self) -> Self:
        return self.build(self.terms + other.terms)

    def scale(self, factor: ExactScalar | Fraction | int) -> Self:
        return self.build(
            self.term_type(t.coeff * factor, t.power, t.delta, t.angular) for t in self.terms
        )

    def contract(self, a: IndexName, b: IndexName) -> Self:
        return self.build(
            self.term_type(t.coeff, t.power, t.delta, contract(t.angular, a, b)) for t in self.terms
        )

    def outer(self, tensor: TensorExpr) -> Self:
        return self.build(
            self.term_type(t.coeff, t.power, t.delta, t.angular.outer(tensor.with_side(self.side)))
            for t in self.terms
        )

    def relabel(self, mapping: dict[IndexName, IndexName]) -> Self:
        return self.build(
            self.term_type(t.coeff, t.power, t.delta, t.angular.relabel(mapping)) for t in self.terms
        )

    def expanded(self) -> dict[ExpandedKey, ExactScalar]:
        """Fully distributed form: one exact coefficient per tensor term."""
        total: dict[ExpandedKey, ExactScalar] = {}
        for t in self.terms:
            for tensor_term, c in t.angular.terms:
                key = (t.power, t.delta, tensor_term)
                total[key] = total.get(key, ZERO) + t.coeff * c
        return {key: value for key, value in total.items() if not value.is_zero}

    def equivalent(self, other: _Expansion) -> bool:
        return self.expanded() == other.expanded()

    def coefficient(self, power: int, delta: bool, term: TensorTerm) -> ExactScalar:
        return self.expanded().get((power, delta, term), ZERO)

    def render_term(self, t: ExpansionTerm) -> str:
        text = f"{t.coeff.render()} * {self.power_symbol}^{t.power}"
        if t.delta:
            text += f" * {self.delta_symbol}"
        return f"{text} * ({t.angular.render()})"

    def render(self) -> str:
        if self.is_zero:
            return "0"
        return "\n".join(self.render_term(t) for t in self.terms)

    def to_json(self) -> list[dict[str, object]]:
        return [
            {
                "coeff": t.coeff.to_json(),
                self.power_field: t.power,
                self.delta_field: t.delta,
                "angular": t.angular.render(),
            }
            for t in self.terms
        ]

    def __str__(self) -> str:
        return self.render()


@dataclass(frozen=True, slots=True)
class PositionExpr(_Expansion):
    """Coordinate-space result: a sum of :class:`PositionTerm`."""

    term_type: ClassVar[type[ExpansionTerm]] = PositionTerm
    side: ClassVar[Side] = Side.POSITION
    power_symbol: ClassVar[str] = "r"
    delta_symbol: ClassVar[str] = "delta3"
    power_field: ClassVar[str] = "r_pow"
    delta_field: ClassVar[str] = "delta3"


@dataclass(frozen=True, slots=True)
class MomentumResult(_Expansion):
    """Momentum-space result; ``delta3p`` marks a ``delta(p)`` factor."""

    term_type: ClassVar[type[ExpansionTerm]] = MomentumTerm
    side: ClassVar[Side] = Side.MOMENTUM
    power_symbol: ClassVar[str] = "p"
    delta_symbol: ClassVar[str] = "delta3p"
    power_field: ClassVar[str] = "p_pow"
    delta_field: ClassVar[str] = "delta3p"


@dataclass(frozen=True, slots=True)
class MomentumExpr:
    """``coeff * p**n * angular``.

    With ``hat_normalized`` false the angular factors are full momentum
    components, each contributing one power of ``p``.
    """

    n: int
    angular: TensorExpr
    hat_normalized: bool = True
    coeff: ExactScalar = ONE

    @property
    def n_eff(self) -> int:
        return self.n if self.hat_normalized else self.n + self.angular.rank

    def as_result(self) -> MomentumResult:
        return MomentumResult.build(
            MomentumTerm(self.coeff, self.n_eff, False, part)
            for part in components(self.angular).values()
        )


def _forward_rule(n: int, ell: int) -> tuple[ExactScalar, int, bool]:
    region = classify(n, ell)
    if region is Region.REGULAR:
        return ExactScalar(Fraction(1, 2), ell, -2) * chi(n, ell), -(n + 3), False
    if region is Region.DELTA:
        return ExactScalar(Fraction(double_factorial(2 * ell + 1)), ell), -ell, True
    raise DomainError(f"(n={n}, l={ell}) is outside framework: need -(l+3) < n <= l")


def _inverse_rule(r_pow: int, ell: int, delta: bool) -> tuple[ExactScalar, int, bool]:
    minus_i = 3 * ell
    if delta:
        if r_pow == -ell:
            return ExactScalar(Fraction(1, double_factorial(2 * ell + 1)), minus_i), ell, False
    else:
        region = classify(r_pow, ell)
        if region is Region.REGULAR:
            return ExactScalar(Fraction(4), minus_i, 1) * chi(r_pow, ell), -(r_pow + 3), False
        if region is Region.DELTA:
            scale = 8 * double_factorial(2 * ell + 1)
            return ExactScalar(Fraction(scale), minus_i, 3), -ell, True
    shape = f"r^{r_pow}{' * delta3' if delta else ''} with l={ell}"
    raise UnsupportedShapeError(
        f"no transform for {shape}; supported rows: {'; '.join(SUPPORTED_ROWS)}"
    )


def forward(expr: MomentumExpr) -> PositionExpr:
    """Transform ``coeff * p**n * angular`` to coordinate space."""
    parts = components(expr.angular)
    n_eff = expr.n_eff
    terms = []
    for ell, part in parts.items():
        coeff, r_pow, delta = _forward_rule(n_eff, ell)
        terms.append(PositionTerm(expr.coeff * coeff, r_pow, delta, part.with_side(Side.POSITION)))
    return PositionExpr.build(terms)


def forward_delta_p(angular: TensorExpr, coeff: ExactScalar = ONE) -> PositionExpr:
    """Transform ``coeff * p**-ell * delta(p) * angular``, one ``ell`` per component."""
    terms = []
    for ell, part in components(angular).items():
        scale = ExactScalar(Fraction(1, 8 * double_factorial(2 * ell + 1)), ell, -3)
        terms.append(PositionTerm(coeff * scale, ell, False, part.with_side(Side.POSITION)))
    return PositionExpr.build(terms)


def forward_result(result: MomentumResult) -> PositionExpr:
    """Transform a momentum-space sum, including ``delta(p)`` terms."""
    total = PositionExpr()
    for term in result.terms:
        if not term.delta:
            total = total + forward(MomentumExpr(term.power, term.angular, True, term.coeff))
            continue
        for ell, part in components(term.angular).items():
            if term.power != -ell:
                raise UnsupportedShapeError(
                    f"delta3p term with p^{term.power} and l={ell} needs p^{-ell}"
                )
            total = total + forward_delta_p(part, term.coeff)
    return total


def inverse(expr: PositionExpr) -> MomentumResult:
    """Transform a coordinate-space sum back to momentum space."""
    terms = []
    for term in expr.terms:
        for ell, part in components(term.angular).items():
            coeff, p_pow, delta = _inverse_rule(term.power, ell, term.delta)
            terms.append(
                MomentumTerm(term.coeff * coeff, p_pow, delta, part.with_side(Side.MOMENTUM))
            )
    return MomentumResult.build(terms)


@dataclass(frozen=True, slots=True)
class YlmTerm:
    """``coeff * s**power [* delta] * Y_ell^m`` on either side."""

    coeff: ExactScalar
    power: int
    delta: bool
    ell: int
    m: int
    side: Side

    def render(self) -> str:
        symbol, delta_symbol = ("p", "delta3p") if self.side is Side.MOMENTUM else ("r", "delta3")
        text = f"{self.coeff.render()} * {symbol}^{self.power}"
        if self.delta:
            text += f" * {delta_symbol}"
        return f"{text} * Y[{self.ell},{self.m}]"


def forward_ylm(term: YlmTerm) -> YlmTerm:
    if term.side is not Side.MOMENTUM:
        raise DomainError("forward transform needs a momentum-side term")
    if term.delta:
        if term.power != -term.ell:
            raise UnsupportedShapeError(f"delta3p term needs p^{-term.ell}")
        scale = ExactScalar(Fraction(1, 8 * double_factorial(2 * term.ell + 1)), term.ell, -3)
        return YlmTerm(term.coeff * scale, term.ell, False, term.ell, term.m, Side.POSITION)
    coeff, r_pow, delta = _forward_rule(term.power, term.ell)
    return YlmTerm(term.coeff * coeff, r_pow, delta, term.ell, term.m, Side.POSITION)


def inverse_ylm(term: YlmTerm) -> YlmTerm:
    if term.side is not Side.POSITION:
        raise DomainError("inverse transform needs a position-side term")
    coeff, p_pow, delta = _inverse_rule(term.power, term.ell, term.delta)
    return YlmTerm(term.coeff * coeff, p_pow, delta, term.ell, term.m, Side.MOMENTUM)


class IdentityKind(StrEnum):
    DERIV_INV_R = "deriv_inv_r"
    DERIV_INV_R2 = "deriv_inv_r2"
    DERIV_DELTA3 = "deriv_delta3"
    FULL_DERIV_INV_R = "full_deriv_inv_r"
    DIPOLE_E = "dipole_E"
    DIPOLE_B = "dipole_B"
    LAPLACIAN_INV_R = "laplacian_inv_r"
    RADIAL_DELTA = "radial_delta"


@dataclass(frozen=True, slots=True)
class IdentityRecord:
    """A derivative expression and its coordinate-space expansion.

    The left side is ``operator`` applied to ``base``.  Operator terms are
    read as derivatives: each hat ``h[a]`` is ``d/dx_a`` and the remaining
    order, ``order - len(hats)``, is made up by powers of the Laplacian.
    ``vector`` names a constant vector contracted into the last index.
    """

    lhs_kind: IdentityKind
    k: int
    indices: tuple[IndexName, ...]
    rhs: PositionExpr
    base: PositionExpr
    operator: TensorExpr
    order: int
    vector: str | None = None

    def render_lhs(self) -> str:
        text = f"D^{self.order}[{self.operator.render()}] applied to {self.base.render()}"
        if self.vector is not None:
            text += f", contracted with {self.vector}[{self.indices[-1]}]"
        return text

    def render(self) -> str:
        header = f"{self.lhs_kind} k={self.k}"
        if self.indices:
            header += f" indices={','.join(self.indices)}"
        return "\n".join([header, f"lhs: {self.render_lhs()}", "rhs:", self.rhs.render()])


def _scalar_term(coeff: ExactScalar, r_pow: int, delta: bool) -> PositionExpr:
    return PositionExpr.build(
        [PositionTerm(coeff, r_pow, delta, TensorExpr.scalar(1, Side.POSITION))]
    )


INV_R = _scalar_term(ONE, -1, False)
INV_R2 = _scalar_term(ONE, -2, False)
DELTA3 = _scalar_term(ONE, 0, True)


def apply_operator(base: PositionExpr, operator: TensorExpr, order: int) -> PositionExpr:
    """Differentiate a rotation-invariant ``base`` by going through momentum space.

    Derivatives become factors ``i p``; the result is transformed back with
    :func:`forward`.
    """
    total = PositionExpr()
    for term in inverse(base).terms:
        if term.delta or term.angular.rank:
            raise DomainError("operator base must be a scalar function of r without delta(p)")
        coeff = term.coeff * i_power(order) * term.angular.terms[0][1]
        momentum = MomentumExpr(term.power + order, operator.with_side(Side.MOMENTUM), True, coeff)
        total = total + forward(momentum)
    return total


_DERIVATIVE_BASES = {
    "inv_r": (IdentityKind.DERIV_INV_R, INV_R),
    "inv_r2": (IdentityKind.DERIV_INV_R2, INV_R2),
    "delta3": (IdentityKind.DERIV_DELTA3, DELTA3),
}


def derivative_identity(
    kind: str, k: int, indices: Sequence[IndexName] | None = None, l_max: int = L_MAX
) -> IdentityRecord:
    """Traceless top derivative ``(d...d)^k_k`` of ``1/r``, ``1/r**2`` or ``delta3``."""
    if kind not in _DERIVATIVE_BASES:
        raise DomainError(f"unknown identity kind {kind!r}; expected one of {sorted(_DERIVATIVE_BASES)}")
    if not 0 <= k <= l_max:
        raise DomainError(f"derivative order k={k} outside [0, {l_max}]")
    names = tuple(indices) if indices is not None else default_indices(k)
    lhs_kind, base = _DERIVATIVE_BASES[kind]
    operator = traceless_top(k, names, l_max=l_max)
    return IdentityRecord(
        lhs_kind, k, names, apply_operator(base, operator, k), base, operator, k
    )


def full_derivative_inv_r(k: int, indices: Sequence[IndexName] | None = None) -> IdentityRecord:
    """Plain ``d_{i1}...d_{ik} (1/r)`` with all delta-function terms."""
    if k >= 4:
        raise DomainError(
            f"k={k} requires delta-derivative transforms, out of scope (l=k-4 has n > l)"
        )
    if k < 1:
        raise DomainError(f"derivative order k={k} must be at least 1")
    names = tuple(indices) if indices is not None else default_indices(k)
    operator = hat_monomial(names)
    return IdentityRecord(
        IdentityKind.FULL_DERIV_INV_R, k, names, apply_operator(INV_R, operator, k), INV_R, operator, k
    )


def dipole_fields(indices: tuple[IndexName, IndexName] = ("i", "j")) -> tuple[IdentityRecord, IdentityRecord]:
    """Electric and magnetic dipole fields as tensors contracted with the moment.

    ``E_i = p_j d_i d_j (1/r)`` and ``B_i = m_j (d_i d_j - delta_ij lap)(1/r)``.
    """
    i, j = indices
    second = full_derivative_inv_r(2, indices)
    electric = IdentityRecord(
        IdentityKind.DIPOLE_E, 2, indices, second.rhs, INV_R, second.operator, 2, vector="p"
    )
    laplacian = second.rhs.contract(i, j)
    magnetic_rhs = second.rhs + laplacian.outer(kronecker(i, j)).scale(-1)
    magnetic_operator = second.operator - kronecker(i, j)
    magnetic = IdentityRecord(
        IdentityKind.DIPOLE_B, 2, indices, magnetic_rhs, INV_R, magnetic_operator, 2, vector="m"
    )
    return electric, magnetic


def poisson_identity() -> IdentityRecord:
    """``-lap (1/(4 pi r)) = delta3``, from the trace of the second derivative."""
    second = full_derivative_inv_r(2, ("i", "j"))
    minus_quarter_over_pi = ExactScalar(Fraction(-1, 4), 0, -1)
    rhs = second.rhs.contract("i", "j").scale(minus_quarter_over_pi)
    return IdentityRecord(
        IdentityKind.LAPLACIAN_INV_R,
        2,
        (),
        rhs,
        INV_R.scale(minus_quarter_over_pi),
        TensorExpr.scalar(1),
        2,
    )


def radial_delta_identity() -> IdentityRecord:
    """``delta3 = delta(r) / (4 pi r**2)``; both sides are held in the ``delta3`` form."""
    return IdentityRecord(
        IdentityKind.RADIAL_DELTA, 0, (), DELTA3, DELTA3, TensorExpr.scalar(1), 0
    )


def gradient_form(record: IdentityRecord, slot: IndexName = "k") -> PositionExpr:
    """``Lambda_slot`` with ``operator(base) = d_slot Lambda_slot``.

    One derivative is peeled off every operator term: ``h[a] -> d[slot,a]``
    when the term has a hat, otherwise one Laplacian becomes ``h[slot]``.
    """
    if record.order < 1:
        raise DomainError("gradient form needs at least one derivative")
    if slot in record.indices:
        raise DomainError(f"gradient slot {slot} clashes with identity indices")
    peeled: dict[TensorTerm, Fraction] = {}
    for term, coefficient in record.operator.terms:
        if term.hats:
            first, rest = term.hats[0], term.hats[1:]
            new = TensorTerm(term.deltas + ((slot, first),), rest)
        else:
            new = TensorTerm(term.deltas, (slot,))
        peeled[new] = peeled.get(new, Fraction(0)) + coefficient
    operator = TensorExpr.build(record.operator.indices + (slot,), peeled)
    return apply_operator(record.base, operator, record.order - 1)


__all__ = [
    "DELTA3",
    "INV_R",
    "INV_R2",
    "IdentityKind",
    "IdentityRecord",
    "MomentumExpr",
    "MomentumResult",
    "MomentumTerm",
    "PositionExpr",
    "PositionTerm",
    "SUPPORTED_ROWS",
    "YlmTerm",
    "apply_operator",
    "derivative_identity",
    "dipole_fields",
    "forward",
    "forward_delta_p",
    "forward_result",
    "full_derivative_inv_r",
    "gradient_form",
    "inverse",
    "inverse_ylm",
    "forward_ylm",
    "poisson_identity",
    "radial_delta_identity",
]
