"""Check identities between generalized functions by pairing with test functions.

Both sides of an identity are integrated against smooth, rapidly decaying
functions ``F(x) = poly(x - c) exp(-|x - c|**2 / s**2)``.  Regular terms are
integrated numerically, angles first; ``delta3`` terms are paired exactly from
the Taylor coefficients of ``F`` at the origin.
"""

from __future__ import annotations

import itertools
import logging
import math
from collections import defaultdict
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from numpy.polynomial import polynomial as P
from numpy.typing import NDArray

from .errors import DomainError, UnpairedDeltaError
from .exact import double_factorial
from .models import BallConfig, BallSurfaceRow, VerificationReport, VerificationRow
from .tensor import IndexName, TensorExpr, angular_momentum, components, eval_tensor_grid, sphere_rule
from .transform import ExpansionTerm, IdentityKind, IdentityRecord, PositionExpr, gradient_form

logger = logging.getLogger(__name__)

FloatArray = NDArray[np.float64]
MultiIndex = tuple[int, int, int]

SHELL_RADIUS = 1e-4

_PLAIN: tuple[tuple[MultiIndex, float], ...] = (((0, 0, 0), 1.0),)


@dataclass(frozen=True, slots=True)
class TestFunction:
    """``poly(x - center) * exp(-|x - center|**2 / width**2)``.

    ``poly`` maps exponent triples to coefficients.
    """

    __test__ = False

    center: tuple[float, float, float]
    width: float
    poly: tuple[tuple[MultiIndex, float], ...] = _PLAIN

    def __post_init__(self) -> None:
        if self.width <= 0:
            raise DomainError(f"test function width must be positive, got {self.width}")
        if len(self.center) != 3:
            raise DomainError("test function centre must be a 3-vector")

    @property
    def label(self) -> str:
        centre = ",".join(f"{x:g}" for x in self.center)
        text = f"gauss(c=({centre}), s={self.width:g}"
        if self.poly != _PLAIN:
            text += f", poly={len(self.poly)} terms"
        return text + ")"

    def evaluate(self, points: FloatArray, orders: MultiIndex = (0, 0, 0)) -> FloatArray:
        """Value of ``d^orders F`` at ``points`` with shape ``(..., 3)``."""
        y = np.asarray(points, dtype=float) - np.asarray(self.center)
        coeffs = _derivative_coeffs(self, orders)
        envelope = np.exp(-np.sum(y * y, axis=-1) / self.width**2)
        return P.polyval3d(y[..., 0], y[..., 1], y[..., 2], coeffs) * envelope

    def derivative(self, orders: MultiIndex, point: Sequence[float] = (0.0, 0.0, 0.0)) -> float:
        return float(self.evaluate(np.asarray(point, dtype=float), orders))

    def __call__(self, points: FloatArray) -> FloatArray:
        return self.evaluate(points)


@lru_cache(maxsize=None)
def _poly_coeffs(fn: TestFunction) -> FloatArray:
    degree = max(max(exps) for exps, _ in fn.poly)
    coeffs = np.zeros((degree + 1,) * 3)
    for (a, b, c), value in fn.poly:
        coeffs[a, b, c] += value
    return coeffs


def _differentiate(coeffs: FloatArray, axis: int, width: float) -> FloatArray:
    # d/dy (q e^{-y^2/s^2}) = (q' - 2 y q / s^2) e^{-y^2/s^2}
    grow = [(0, 0)] * 3
    grow[axis] = (1, 0)
    shifted = np.pad(coeffs, grow)
    derived = P.polyder(coeffs, axis=axis)
    pad = [(0, 0)] * 3
    pad[axis] = (0, shifted.shape[axis] - derived.shape[axis])
    return np.pad(derived, pad) - (2.0 / width**2) * shifted


@lru_cache(maxsize=4096)
def _derivative_coeffs(fn: TestFunction, orders: MultiIndex) -> FloatArray:
    if any(order < 0 for order in orders):
        raise DomainError(f"negative derivative order {orders}")
    if orders == (0, 0, 0):
        return _poly_coeffs(fn)
    axis = next(k for k, order in enumerate(orders) if order)
    lower = list(orders)
    lower[axis] -= 1
    return _differentiate(_derivative_coeffs(fn, tuple(lower)), axis, fn.width)  # type: ignore[arg-type]


def gaussian_family() -> list[TestFunction]:
    """Four plain Gaussians (two centres, two widths) and one polynomial-weighted one."""
    off = (0.3, -0.2, 0.5)
    family = [
        TestFunction(center, width)
        for center in ((0.0, 0.0, 0.0), off)
        for width in (0.7, 1.3)
    ]
    weighted = (
        ((0, 0, 0), 1.0),
        ((1, 0, 0), 0.5),
        ((0, 1, 1), -0.4),
        ((2, 0, 0), 0.3),
    )
    family.append(TestFunction(off, 1.0, weighted))
    return family


@dataclass(frozen=True, slots=True)
class _Field:
    """Linear combination of derivatives of one test function."""

    function: TestFunction
    derivatives: tuple[tuple[MultiIndex, float], ...] = (((0, 0, 0), 1.0),)

    def __call__(self, points: FloatArray) -> FloatArray:
        total = np.zeros(np.shape(points)[:-1])
        for orders, weight in self.derivatives:
            total = total + weight * self.function.evaluate(points, orders)
        return total

    def at_origin(self, extra: MultiIndex) -> float:
        return sum(
            weight * self.function.derivative(tuple(o + e for o, e in zip(orders, extra)))  # type: ignore[arg-type]
            for orders, weight in self.derivatives
        )


def _multi_indices(degree: int) -> Iterable[MultiIndex]:
    for a in range(degree + 1):
        for b in range(degree - a + 1):
            yield (a, b, degree - a - b)


def operator_field(
    fn: TestFunction, operator: TensorExpr, order: int, assignment: Mapping[IndexName, int]
) -> _Field:
    """Apply a derivative operator, read as in :class:`IdentityRecord`, to ``fn``."""
    combination: dict[MultiIndex, float] = defaultdict(float)
    for term, coefficient in operator.terms:
        if any(assignment[a] != assignment[b] for a, b in term.deltas):
            continue
        base = [0, 0, 0]
        for name in term.hats:
            base[assignment[name] - 1] += 1
        rest = order - len(term.hats)
        if rest < 0 or rest % 2:
            raise DomainError(f"operator term {term.render()} does not fit derivative order {order}")
        m = rest // 2
        for split in _multi_indices(m):
            weight = math.factorial(m) // math.prod(math.factorial(x) for x in split)
            orders = tuple(b + 2 * x for b, x in zip(base, split))
            combination[orders] += float(coefficient) * weight  # type: ignore[index]
    return _Field(fn, tuple(sorted((k, v) for k, v in combination.items() if v)))


def _sphere_moment(exponents: Sequence[int]) -> Fraction:
    # average of x^a y^b z^c over the unit sphere
    if any(e % 2 for e in exponents):
        return Fraction(0)
    numerator = math.prod(double_factorial(e - 1) for e in exponents)
    return Fraction(numerator, double_factorial(sum(exponents) + 1))


def _pair_delta_field(
    term: ExpansionTerm, field: _Field, assignment: Mapping[IndexName, int]
) -> float:
    if not term.delta:
        raise DomainError("expected a delta3 term")
    ell = angular_momentum(term.angular)
    if ell is None or term.power != -ell:
        raise UnpairedDeltaError(
            f"unpaired singular delta: r^{term.power} * delta3 with angular part "
            f"{term.angular.render()} has no defined pairing"
        )
    total = 0.0
    for tensor_term, coefficient in term.angular.terms:
        if any(assignment[a] != assignment[b] for a, b in tensor_term.deltas):
            continue
        beta = [0, 0, 0]
        for name in tensor_term.hats:
            beta[assignment[name] - 1] += 1
        for alpha in _multi_indices(ell):
            moment = _sphere_moment([a + b for a, b in zip(alpha, beta)])
            if moment == 0:
                continue
            taylor = field.at_origin(alpha) / math.prod(math.factorial(a) for a in alpha)
            total += float(coefficient * moment) * taylor
    return term.coeff.to_float() * total


def pair_delta(
    term: ExpansionTerm, fn: TestFunction, assignment: Mapping[IndexName, int] | None = None
) -> float:
    """Exact pairing of ``coeff * r**-ell * delta3 * angular`` with ``fn``.

    Only the degree-``ell`` Taylor terms of ``fn`` survive the angular
    average; the powers of ``r`` cancel against them.
    """
    return _pair_delta_field(term, _Field(fn), assignment or {})


def _angular_integrals(
    term: ExpansionTerm,
    field: _Field,
    assignment: Mapping[IndexName, int],
    radii: FloatArray,
    cfg: BallConfig,
) -> FloatArray:
    _, _, vectors, weights = sphere_rule(*cfg.angular_rule)
    tensor = eval_tensor_grid(term.angular, assignment, vectors) * weights
    points = radii[:, None, None, None] * vectors[None, ...]
    return np.einsum("rtp,tp->r", field(points), tensor)


def _check_integrable(term: ExpansionTerm) -> None:
    parts = components(term.angular)
    ell = min(parts) if parts else 0
    if term.power + 2 + ell < 0:
        raise DomainError(
            f"r^{term.power} with angular momentum {ell} is not integrable at the origin"
        )


def _gauss(a: float, b: float, order: int) -> tuple[FloatArray, FloatArray]:
    x, w = np.polynomial.legendre.leggauss(order)
    half = 0.5 * (b - a)
    return half * x + 0.5 * (a + b), half * w


@lru_cache(maxsize=64)
def _radial_rule(fn: TestFunction, cfg: BallConfig) -> tuple[FloatArray, FloatArray]:
    outer = max(2.0 * cfg.R, float(np.linalg.norm(fn.center)) + cfg.tail_widths * fn.width)
    edges = [0.0, cfg.R, *np.linspace(cfg.R, outer, cfg.tail_panels + 1)[1:]]
    pieces = [_gauss(a, b, cfg.radial_rule) for a, b in zip(edges, edges[1:])]
    return np.concatenate([p[0] for p in pieces]), np.concatenate([p[1] for p in pieces])


def _pair_regular_field(
    term: ExpansionTerm,
    field: _Field,
    assignment: Mapping[IndexName, int],
    cfg: BallConfig,
    radial: tuple[FloatArray, FloatArray] | None = None,
) -> float:
    if term.delta:
        raise DomainError("expected a term without delta3")
    _check_integrable(term)
    radii, weights = radial if radial is not None else _radial_rule(field.function, cfg)
    angular = _angular_integrals(term, field, assignment, radii, cfg)
    return term.coeff.to_float() * float(np.sum(weights * radii ** (term.power + 2) * angular))


def pair_regular(
    term: ExpansionTerm,
    fn: TestFunction,
    cfg: BallConfig | None = None,
    assignment: Mapping[IndexName, int] | None = None,
) -> float:
    """``int fn * term d^3r`` for a term without ``delta3``.

    The angular integral is taken first at every radial node; the radial
    integral is split at ``cfg.R`` and cut off where ``fn`` has decayed.
    """
    return _pair_regular_field(term, _Field(fn), assignment or {}, cfg or BallConfig())


def _pair_terms(
    expr: PositionExpr,
    field: _Field,
    assignment: Mapping[IndexName, int],
    cfg: BallConfig,
    radial: tuple[FloatArray, FloatArray] | None = None,
) -> float:
    total = 0.0
    for term in expr.terms:
        if term.delta:
            total += _pair_delta_field(term, field, assignment)
        else:
            total += _pair_regular_field(term, field, assignment, cfg, radial)
    return total


def pair_expr(
    expr: PositionExpr,
    fn: TestFunction,
    cfg: BallConfig | None = None,
    assignment: Mapping[IndexName, int] | None = None,
) -> float:
    """Sum of the pairings of every term of ``expr``."""
    return _pair_terms(expr, _Field(fn), assignment or {}, cfg or BallConfig())


def shell_average(fn: TestFunction, cfg: BallConfig, radius: float = SHELL_RADIUS) -> float:
    """Pairing with ``delta(r) / (4 pi r**2)``: the mean of ``fn`` over a tiny sphere."""
    _, _, vectors, weights = sphere_rule(*cfg.angular_rule)
    return float(np.sum(weights * fn(radius * vectors))) / (4.0 * math.pi)


def identity_lhs(
    record: IdentityRecord,
    fn: TestFunction,
    assignment: Mapping[IndexName, int],
    cfg: BallConfig,
) -> float:
    """Left side of ``record`` paired with ``fn``, derivatives moved onto ``fn``."""
    if record.lhs_kind is IdentityKind.RADIAL_DELTA:
        return shell_average(fn, cfg)
    field = operator_field(fn, record.operator, record.order, assignment)
    sign = -1.0 if record.order % 2 else 1.0
    return sign * _pair_terms(record.base, field, {}, cfg)


def assignments(indices: Sequence[IndexName]) -> list[dict[IndexName, int]]:
    """Every non-decreasing assignment of Cartesian components to ``indices``."""
    return [
        dict(zip(indices, values))
        for values in itertools.combinations_with_replacement((1, 2, 3), len(indices))
    ]


def verify_identity(
    record: IdentityRecord,
    family: Sequence[TestFunction] | None = None,
    tol: float = 1e-6,
    cfg: BallConfig | None = None,
) -> VerificationReport:
    """Pair both sides of ``record`` with every test function and index assignment."""
    cfg = cfg or BallConfig()
    family = list(family) if family is not None else gaussian_family()
    if not family:
        raise DomainError("verification needs at least one test function")
    if not any(any(fn.center) for fn in family):
        raise DomainError("verification family needs an off-centre test function")
    if not any(fn.poly != _PLAIN for fn in family):
        raise DomainError("verification family needs a polynomial-weighted test function")
    report = VerificationReport(identity=f"{record.lhs_kind} k={record.k}", tol=tol)
    for fn in family:
        for assignment in assignments(record.indices):
            lhs = identity_lhs(record, fn, assignment, cfg)
            rhs = _pair_terms(record.rhs, _Field(fn), assignment, cfg)
            abs_diff = abs(lhs - rhs)
            rel_diff = abs_diff / max(1.0, abs(rhs))
            row = VerificationRow(
                function=fn.label,
                assignment=assignment,
                lhs=lhs,
                rhs=rhs,
                abs_diff=abs_diff,
                rel_diff=rel_diff,
                passed=rel_diff <= tol,
            )
            logger.debug("%s %s %s: lhs=%r rhs=%r", report.identity, fn.label, assignment, lhs, rhs)
            report.rows.append(row)
    report.diagnostics = {
        "rows": float(len(report.rows)),
        "max_abs_diff": max(row.abs_diff for row in report.rows),
        "max_rel_diff": max(row.rel_diff for row in report.rows),
    }
    logger.info("%s: %s", report.identity, "pass" if report.verdict else "fail")
    return report


def _ball_rule(radius: float, cfg: BallConfig) -> tuple[FloatArray, FloatArray]:
    return _gauss(0.0, radius, cfg.radial_rule)


def ball_surface_check(
    record: IdentityRecord,
    fn: TestFunction,
    cfg: BallConfig | None = None,
    assignment: Mapping[IndexName, int] | None = None,
    slot: IndexName = "k",
) -> list[BallSurfaceRow]:
    """Split ``int_B(R) fn * d_k Lambda_k`` into surface and ball parts for shrinking ``R``.

    ``surface`` is ``R**2 * int dOmega fn Lambda_k xhat_k`` on the sphere of
    radius ``R`` and ``ball`` is ``int_B(R) (d_k fn) Lambda_k``.  ``rhs_ball``
    pairs the expanded identity with ``fn`` over the same ball, so
    ``rhs_ball == surface - ball``.
    """
    cfg = cfg or BallConfig()
    assignment = dict(assignment or {name: 1 for name in record.indices})
    lam = gradient_form(record, slot)
    _, _, vectors, weights = sphere_rule(*cfg.angular_rule)
    rows = []
    for radius in cfg.R_sequence:
        surface = 0.0
        ball = 0.0
        for axis in (1, 2, 3):
            slot_assignment = {**assignment, slot: axis}
            on_sphere = fn(radius * vectors) * vectors[..., axis - 1] * weights
            for term in lam.terms:
                if term.delta:
                    continue
                tensor = eval_tensor_grid(term.angular, slot_assignment, vectors)
                surface += (
                    term.coeff.to_float() * radius ** (term.power + 2) * float(np.sum(on_sphere * tensor))
                )
            orders = [0, 0, 0]
            orders[axis - 1] = 1
            gradient = _Field(fn, ((tuple(orders), 1.0),))  # type: ignore[arg-type]
            ball += _pair_terms(lam, gradient, slot_assignment, cfg, _ball_rule(radius, cfg))
        rhs_ball = _pair_terms(record.rhs, _Field(fn), assignment, cfg, _ball_rule(radius, cfg))
        logger.debug("ball R=%g: surface=%r ball=%r rhs=%r", radius, surface, ball, rhs_ball)
        rows.append(BallSurfaceRow(R=radius, surface=surface, ball=ball, rhs_ball=rhs_ball))
    return rows


def log_slope(rows: Sequence[BallSurfaceRow], attribute: str) -> float:
    """Least-squares slope of ``log|value|`` against ``log R``."""
    radii = np.log([row.R for row in rows])
    values = np.log([abs(getattr(row, attribute)) for row in rows])
    return float(np.polyfit(radii, values, 1)[0])


__all__ = [
    "TestFunction",
    "assignments",
    "ball_surface_check",
    "gaussian_family",
    "identity_lhs",
    "log_slope",
    "operator_field",
    "pair_delta",
    "pair_expr",
    "pair_regular",
    "shell_average",
    "verify_identity",
]
