"""Exact symmetric tensor algebra over abstract three-dimensional indices.

A tensor term is a product of Kronecker deltas and unit-vector components
(``d[a,b]`` and ``h[c]``).  A :class:`TensorExpr` is an exact rational
combination of such terms in which every free index appears exactly once per
term.  The angular-momentum decomposition of ``h[i1]*...*h[iL]`` is built by
projection with Legendre polynomials and exact angular averages.
"""

from __future__ import annotations

import itertools
import math
import re
from collections import Counter, defaultdict
from collections.abc import Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass, field
from enum import StrEnum
from fractions import Fraction
from functools import lru_cache

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import special

from .errors import DomainError, IndexArgumentError
from .exact import double_factorial

IndexName = str
Pair = tuple[IndexName, IndexName]

L_MAX = 8

_INDEX_RE = re.compile(r"^([A-Za-z_]*)(\d*)$")


class Side(StrEnum):
    MOMENTUM = "momentum"
    POSITION = "position"


def index_key(name: IndexName) -> tuple[str, int, str]:
    """Natural sort key, so that ``i2`` sorts before ``i10``."""
    match = _INDEX_RE.match(name)
    if match is None:
        return (name, -1, name)
    prefix, digits = match.groups()
    return (prefix, int(digits) if digits else -1, name)


def default_indices(rank: int) -> tuple[IndexName, ...]:
    return tuple(f"i{k}" for k in range(1, rank + 1))


def _sorted_indices(names: Iterable[IndexName]) -> tuple[IndexName, ...]:
    return tuple(sorted(names, key=index_key))


def _canonical_pair(a: IndexName, b: IndexName) -> Pair:
    return (a, b) if index_key(a) <= index_key(b) else (b, a)


def _pair_key(pair: Pair) -> tuple[tuple[str, int, str], tuple[str, int, str]]:
    return (index_key(pair[0]), index_key(pair[1]))


@dataclass(frozen=True, slots=True)
class TensorTerm:
    """Product of deltas and hat components, kept in canonical order."""

    deltas: tuple[Pair, ...] = ()
    hats: tuple[IndexName, ...] = ()

    def __post_init__(self) -> None:
        deltas = tuple(sorted((_canonical_pair(a, b) for a, b in self.deltas), key=_pair_key))
        object.__setattr__(self, "deltas", deltas)
        object.__setattr__(self, "hats", _sorted_indices(self.hats))

    @property
    def indices(self) -> tuple[IndexName, ...]:
        return _sorted_indices([*itertools.chain.from_iterable(self.deltas), *self.hats])

    def sort_key(self) -> tuple:
        return (
            len(self.deltas),
            tuple(index_key(h) for h in self.hats),
            tuple(_pair_key(p) for p in self.deltas),
        )

    def relabel(self, mapping: Mapping[IndexName, IndexName]) -> TensorTerm:
        return TensorTerm(
            tuple((mapping.get(a, a), mapping.get(b, b)) for a, b in self.deltas),
            tuple(mapping.get(h, h) for h in self.hats),
        )

    def render(self) -> str:
        factors = [f"d[{a},{b}]" for a, b in self.deltas] + [f"h[{h}]" for h in self.hats]
        return "*".join(factors)


@dataclass(frozen=True, slots=True)
class TensorExpr:
    """Exact linear combination of :class:`TensorTerm` over fixed free indices.

    Build instances with :meth:`build`, which drops zero coefficients and
    checks that every term uses exactly the declared indices.
    """

    indices: tuple[IndexName, ...]
    terms: tuple[tuple[TensorTerm, Fraction], ...]
    side: Side = Side.MOMENTUM
    _lookup: dict[TensorTerm, Fraction] = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_lookup", dict(self.terms))

    @classmethod
    def build(
        cls,
        indices: Iterable[IndexName],
        coefficients: Mapping[TensorTerm, Fraction | int],
        side: Side = Side.MOMENTUM,
    ) -> TensorExpr:
        names = _sorted_indices(indices)
        if len(set(names)) != len(names):
            raise IndexArgumentError(f"repeated free index in {names}")
        kept = []
        for term, coefficient in coefficients.items():
            coefficient = Fraction(coefficient)
            if coefficient == 0:
                continue
            if term.indices != names:
                raise IndexArgumentError(
                    f"term {term.render() or '1'} does not use free indices {names}"
                )
            kept.append((term, coefficient))
        kept.sort(key=lambda item: item[0].sort_key())
        return cls(names, tuple(kept), side)

    @classmethod
    def scalar(cls, value: Fraction | int = 1, side: Side = Side.MOMENTUM) -> TensorExpr:
        return cls.build((), {TensorTerm(): value}, side)

    @property
    def rank(self) -> int:
        return len(self.indices)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, term: TensorTerm) -> Fraction:
        return self._lookup.get(term, Fraction(0))

    def as_dict(self) -> dict[TensorTerm, Fraction]:
        return dict(self.terms)

    def _combine(self, other: TensorExpr, sign: int) -> TensorExpr:
        if self.indices != other.indices:
            raise IndexArgumentError(f"index mismatch {self.indices} vs {other.indices}")
        total: dict[TensorTerm, Fraction] = defaultdict(Fraction, self.terms)
        for term, coefficient in other.terms:
            total[term] += sign * coefficient
        return TensorExpr.build(self.indices, total, self.side)

    def __add__(self, other: TensorExpr) -> TensorExpr:
        return self._combine(other, 1)

    def __sub__(self, other: TensorExpr) -> TensorExpr:
        return self._combine(other, -1)

    def __neg__(self) -> TensorExpr:
        return self.scale(-1)

    def scale(self, factor: Fraction | int) -> TensorExpr:
        return TensorExpr.build(
            self.indices, {t: c * factor for t, c in self.terms}, self.side
        )

    def with_side(self, side: Side) -> TensorExpr:
        return TensorExpr(self.indices, self.terms, side)

    def relabel(self, mapping: Mapping[IndexName, IndexName]) -> TensorExpr:
        indices = [mapping.get(name, name) for name in self.indices]
        total: dict[TensorTerm, Fraction] = defaultdict(Fraction)
        for term, coefficient in self.terms:
            total[term.relabel(mapping)] += coefficient
        return TensorExpr.build(indices, total, self.side)

    def outer(self, other: TensorExpr) -> TensorExpr:
        if set(self.indices) & set(other.indices):
            raise IndexArgumentError("outer product needs disjoint indices")
        total: dict[TensorTerm, Fraction] = defaultdict(Fraction)
        for (t1, c1), (t2, c2) in itertools.product(self.terms, other.terms):
            total[TensorTerm(t1.deltas + t2.deltas, t1.hats + t2.hats)] += c1 * c2
        return TensorExpr.build(self.indices + other.indices, total, self.side)

    def monic(self) -> tuple[Fraction, TensorExpr]:
        """Split off the leading coefficient so the first term reads ``1``."""
        if self.is_zero:
            return Fraction(0), self
        lead = self.terms[0][1]
        return lead, self.scale(1 / lead)

    def sort_key(self) -> tuple:
        return tuple((term.sort_key(), coefficient) for term, coefficient in self.terms)

    def render(self) -> str:
        if self.is_zero:
            return "0"
        parts = []
        for term, coefficient in self.terms:
            body = term.render()
            parts.append(f"{coefficient} * {body}" if body else str(coefficient))
        return " + ".join(parts)

    def __str__(self) -> str:
        return self.render()


@dataclass(frozen=True, slots=True)
class LegendreCoeffs:
    """Coefficients of ``u**k`` in the Legendre polynomial ``P_ell(u)``."""

    ell: int
    coeffs: tuple[Fraction, ...]

    def __call__(self, u: float) -> float:
        return float(np.polynomial.polynomial.polyval(u, [float(c) for c in self.coeffs]))


def pairings(names: Sequence[IndexName]) -> Iterator[tuple[Pair, ...]]:
    """Yield every complete delta pairing of ``names`` (none for odd length)."""
    if not names:
        yield ()
        return
    if len(names) % 2:
        return
    first, rest = names[0], names[1:]
    for pos, partner in enumerate(rest):
        remaining = rest[:pos] + rest[pos + 1 :]
        for tail in pairings(remaining):
            yield ((first, partner),) + tail


def hat_monomial(indices: Sequence[IndexName], side: Side = Side.MOMENTUM) -> TensorExpr:
    return TensorExpr.build(indices, {TensorTerm((), tuple(indices)): 1}, side)


def kronecker(a: IndexName, b: IndexName, side: Side = Side.MOMENTUM) -> TensorExpr:
    return TensorExpr.build((a, b), {TensorTerm(((a, b),)): 1}, side)


def symmetric_sum(
    indices: Sequence[IndexName], n_hats: int, side: Side = Side.MOMENTUM
) -> TensorExpr:
    """Sum, with unit weights, of all distinct terms carrying ``n_hats`` hats."""
    names = _sorted_indices(indices)
    if n_hats < 0 or n_hats > len(names) or (len(names) - n_hats) % 2:
        return TensorExpr.build(names, {}, side)
    total: dict[TensorTerm, Fraction] = {}
    for hats in itertools.combinations(names, n_hats):
        rest = [name for name in names if name not in hats]
        for deltas in pairings(rest):
            total[TensorTerm(deltas, hats)] = Fraction(1)
    return TensorExpr.build(names, total, side)


def angular_average(indices: Sequence[IndexName], side: Side = Side.MOMENTUM) -> TensorExpr:
    """Exact average of ``h[i1]*...*h[iN]`` over the unit sphere."""
    if len(indices) % 2:
        return TensorExpr.build(indices, {}, side)
    weight = Fraction(1, double_factorial(len(indices) + 1))
    return symmetric_sum(indices, 0, side).scale(weight)


def _reduce(deltas: Iterable[Pair], hats: Iterable[IndexName]) -> tuple[int, TensorTerm]:
    """Eliminate repeated indices with the three-dimensional contraction rules."""
    pairs = [list(pair) for pair in deltas]
    vecs = list(hats)
    factor = 1
    while True:
        for pos, (a, b) in enumerate(pairs):
            if a == b:
                factor *= 3
                del pairs[pos]
                break
            if _substitute(pairs, vecs, a, b, skip=pos) or _substitute(pairs, vecs, b, a, skip=pos):
                del pairs[pos]
                break
        else:
            repeated = [name for name, count in Counter(vecs).items() if count > 1]
            if not repeated:
                break
            for name in repeated:
                vecs.remove(name)
                vecs.remove(name)
    return factor, TensorTerm(tuple((a, b) for a, b in pairs), tuple(vecs))


def _substitute(
    pairs: list[list[IndexName]], vecs: list[IndexName], old: IndexName, new: IndexName, skip: int
) -> bool:
    for pos, pair in enumerate(pairs):
        if pos == skip:
            continue
        for slot in (0, 1):
            if pair[slot] == old:
                pair[slot] = new
                return True
    for pos, name in enumerate(vecs):
        if name == old:
            vecs[pos] = new
            return True
    return False


def contract(expr: TensorExpr, a: IndexName, b: IndexName) -> TensorExpr:
    """Contract free indices ``a`` and ``b``; the rank drops by two."""
    if a == b:
        raise IndexArgumentError(f"cannot contract index {a} with itself")
    missing = {a, b} - set(expr.indices)
    if missing:
        raise IndexArgumentError(f"indices {sorted(missing)} are not free in expression")
    remaining = [name for name in expr.indices if name not in (a, b)]
    total: dict[TensorTerm, Fraction] = defaultdict(Fraction)
    for term, coefficient in expr.terms:
        renamed = term.relabel({b: a})
        factor, reduced = _reduce(renamed.deltas, renamed.hats)
        total[reduced] += coefficient * factor
    return TensorExpr.build(remaining, total, expr.side)


@lru_cache(maxsize=None)
def legendre_coeffs(ell: int) -> LegendreCoeffs:
    """Exact coefficients of ``P_ell`` from the Bonnet recurrence."""
    if ell < 0:
        raise DomainError(f"negative Legendre degree {ell}")
    prev: list[Fraction] = [Fraction(1)]
    if ell == 0:
        return LegendreCoeffs(0, tuple(prev))
    cur: list[Fraction] = [Fraction(0), Fraction(1)]
    for n in range(1, ell):
        nxt = [Fraction(0)] * (n + 2)
        for k, c in enumerate(cur):
            nxt[k + 1] += Fraction(2 * n + 1, n + 1) * c
        for k, c in enumerate(prev):
            nxt[k] -= Fraction(n, n + 1) * c
        prev, cur = cur, nxt
    return LegendreCoeffs(ell, tuple(cur))


def _projection_weight(rank: int, ell: int, n_hats: int) -> Fraction:
    # Average of P_ell(u) times the rank-L monomial, with u = x'.x expanded in
    # powers u**k.  Each pairing of the L free and k dummy indices reduces to a
    # term with n_hats hats; count the pairings that land on a given term.
    total = Fraction(0)
    for k, c in enumerate(legendre_coeffs(ell).coeffs):
        if c == 0 or k < n_hats or (k - n_hats) % 2:
            continue
        count = math.perm(k, n_hats) * double_factorial(k - n_hats - 1)
        total += c * Fraction(count, double_factorial(rank + k + 1))
    return (2 * ell + 1) * total


@lru_cache(maxsize=None)
def _decompose_default(rank: int) -> dict[int, TensorExpr]:
    names = default_indices(rank)
    sums = {h: symmetric_sum(names, h) for h in range(rank % 2, rank + 1, 2)}
    result: dict[int, TensorExpr] = {}
    for ell in range(rank, -1, -2):
        component = TensorExpr.build(names, {})
        for h, basis in sums.items():
            component = component + basis.scale(_projection_weight(rank, ell, h))
        if not component.is_zero:
            result[ell] = component
    return result


def _checked_rank(rank: int, l_max: int) -> None:
    if rank < 0:
        raise DomainError(f"negative rank {rank}")
    if rank > l_max:
        raise DomainError(f"rank {rank} exceeds l_max={l_max}")


def decompose(
    rank: int,
    indices: Sequence[IndexName] | None = None,
    side: Side = Side.MOMENTUM,
    l_max: int = L_MAX,
) -> dict[int, TensorExpr]:
    """Split ``h[i1]*...*h[iL]`` into parts of definite angular momentum.

    Returns a map ``ell -> component`` for ``ell = L, L-2, ...``; the
    components sum to the original monomial.
    """
    _checked_rank(rank, l_max)
    parts = _decompose_default(rank)
    mapping = _relabel_map(rank, indices)
    return {ell: part.relabel(mapping).with_side(side) for ell, part in parts.items()}


def _relabel_map(rank: int, indices: Sequence[IndexName] | None) -> dict[IndexName, IndexName]:
    if indices is None:
        return {}
    if len(indices) != rank:
        raise IndexArgumentError(f"expected {rank} indices, got {len(indices)}")
    return dict(zip(default_indices(rank), indices))


def components(expr: TensorExpr, l_max: int = L_MAX) -> dict[int, TensorExpr]:
    """Angular-momentum components of an arbitrary tensor expression.

    Deltas are rotation invariant, so each term is split by decomposing its hat
    monomial alone.
    """
    total: dict[int, dict[TensorTerm, Fraction]] = defaultdict(lambda: defaultdict(Fraction))
    for term, coefficient in expr.terms:
        parts = decompose(len(term.hats), term.hats, l_max=l_max)
        for ell, part in parts.items():
            for sub, sub_coefficient in part.terms:
                merged = TensorTerm(term.deltas + sub.deltas, sub.hats)
                total[ell][merged] += coefficient * sub_coefficient
    result = {}
    for ell in sorted(total, reverse=True):
        part = TensorExpr.build(expr.indices, total[ell], expr.side)
        if not part.is_zero:
            result[ell] = part
    return result


def angular_momentum(expr: TensorExpr) -> int | None:
    """Return ``ell`` when ``expr`` has a single angular-momentum component."""
    parts = components(expr, l_max=max(L_MAX, expr.rank))
    if len(parts) != 1:
        return None
    return next(iter(parts))


def _solve_rational(matrix: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    """Solve a consistent, possibly overdetermined system exactly."""
    rows = [row[:] + [value] for row, value in zip(matrix, rhs)]
    n_unknowns = len(matrix[0]) if matrix else 0
    pivot_row = 0
    for col in range(n_unknowns):
        pivot = next((r for r in range(pivot_row, len(rows)) if rows[r][col] != 0), None)
        assert pivot is not None, "singular trace system"
        rows[pivot_row], rows[pivot] = rows[pivot], rows[pivot_row]
        lead = rows[pivot_row][col]
        rows[pivot_row] = [value / lead for value in rows[pivot_row]]
        for r in range(len(rows)):
            if r != pivot_row and rows[r][col] != 0:
                shift = rows[r][col]
                rows[r] = [a - shift * b for a, b in zip(rows[r], rows[pivot_row])]
        pivot_row += 1
    for row in rows[pivot_row:]:
        assert row[-1] == 0, "inconsistent trace system"
    return [rows[k][-1] for k in range(n_unknowns)]


@lru_cache(maxsize=None)
def _traceless_top_default(rank: int) -> TensorExpr:
    names = default_indices(rank)
    bases = [symmetric_sum(names, rank - 2 * m) for m in range(rank // 2 + 1)]
    if rank < 2:
        return bases[0]
    traces = [contract(basis, names[0], names[1]) for basis in bases]
    equations = sorted(
        {term for trace in traces for term, _ in trace.terms}, key=TensorTerm.sort_key
    )
    matrix = [[trace.coefficient(term) for trace in traces[1:]] for term in equations]
    rhs = [-traces[0].coefficient(term) for term in equations]
    solution = _solve_rational(matrix, rhs)
    result = bases[0]
    for coefficient, basis in zip(solution, bases[1:]):
        result = result + basis.scale(coefficient)
    return result


def traceless_top(
    rank: int,
    indices: Sequence[IndexName] | None = None,
    side: Side = Side.MOMENTUM,
    l_max: int = L_MAX,
) -> TensorExpr:
    """Symmetric traceless part of the rank-L hat monomial, by trace ansatz.

    Terms with ``m`` deltas share an unknown coefficient ``A_m`` which is fixed
    by requiring the contraction over the first index pair to vanish.
    """
    _checked_rank(rank, l_max)
    return _traceless_top_default(rank).relabel(_relabel_map(rank, indices)).with_side(side)


def eval_tensor_grid(
    expr: TensorExpr, assignment: Mapping[IndexName, int], unit_vectors: ArrayLike
) -> NDArray[np.float64]:
    """Evaluate ``expr`` on an array of unit vectors with shape ``(..., 3)``."""
    missing = set(expr.indices) - set(assignment)
    if missing:
        raise IndexArgumentError(f"no value assigned to indices {sorted(missing)}")
    for name in expr.indices:
        if assignment[name] not in (1, 2, 3):
            raise IndexArgumentError(f"index {name} assigned {assignment[name]}, expected 1..3")
    vectors = np.asarray(unit_vectors, dtype=float)
    out = np.zeros(vectors.shape[:-1])
    for term, coefficient in expr.terms:
        if any(assignment[a] != assignment[b] for a, b in term.deltas):
            continue
        value = np.full(vectors.shape[:-1], float(coefficient))
        for name in term.hats:
            value = value * vectors[..., assignment[name] - 1]
        out += value
    return out


def eval_tensor(
    expr: TensorExpr, assignment: Mapping[IndexName, int], unit_vector: Sequence[float]
) -> float:
    vector = np.asarray(unit_vector, dtype=float)
    if vector.shape != (3,) or abs(float(np.dot(vector, vector)) - 1.0) > 1e-12:
        raise IndexArgumentError(f"{list(unit_vector)} is not a unit vector")
    return float(eval_tensor_grid(expr, assignment, vector))


def sphere_rule(
    n_theta: int, n_phi: int
) -> tuple[NDArray[np.float64], NDArray[np.float64], NDArray[np.float64], NDArray[np.float64]]:
    """Product rule on the unit sphere: Gauss-Legendre in cos(theta), uniform in phi.

    Returns ``(theta, phi, unit_vectors, weights)`` on an ``(n_theta, n_phi)``
    grid; the weights sum to ``4*pi``.
    """
    x, w = np.polynomial.legendre.leggauss(n_theta)
    theta = np.arccos(x)
    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
    sin_t = np.sqrt(1.0 - x**2)
    vectors = np.stack(
        [
            sin_t[:, None] * np.cos(phi)[None, :],
            sin_t[:, None] * np.sin(phi)[None, :],
            np.broadcast_to(x[:, None], (n_theta, n_phi)),
        ],
        axis=-1,
    )
    weights = w[:, None] * np.full(n_phi, 2.0 * np.pi / n_phi)[None, :]
    return theta, phi, vectors, weights


def ylm_cross_check(rank: int, ell: int, sample_count: int, seed: int = 0) -> float:
    """Compare a decomposition component against its spherical-harmonic expansion.

    Projects the monomial (indices assigned 1, 2, 3, 1, ...) onto ``Y_ell^m``
    by sphere quadrature, rebuilds ``sum_m C_m Y_ell^m`` at random directions
    and returns the largest deviation from the exact component.
    """
    if not 0 <= ell <= min(rank, L_MAX):
        raise DomainError(f"ell={ell} must lie in [0, min({rank}, {L_MAX})]")
    names = default_indices(rank)
    assignment = {name: pos % 3 + 1 for pos, name in enumerate(names)}
    theta, phi, vectors, weights = sphere_rule(2 * rank + 2, 4 * rank + 4)
    monomial = eval_tensor_grid(hat_monomial(names), assignment, vectors)

    rng = np.random.default_rng(seed)
    samples = rng.normal(size=(sample_count, 3))
    samples /= np.linalg.norm(samples, axis=1)[:, None]
    s_theta = np.arccos(np.clip(samples[:, 2], -1.0, 1.0))
    s_phi = np.arctan2(samples[:, 1], samples[:, 0])

    rebuilt = np.zeros(sample_count, dtype=complex)
    for m in range(-ell, ell + 1):
        grid_y = special.sph_harm_y(ell, m, theta[:, None], phi[None, :])
        c_lm = np.sum(weights * np.conj(grid_y) * monomial)
        rebuilt += c_lm * special.sph_harm_y(ell, m, s_theta, s_phi)

    parts = decompose(rank)
    if ell in parts:
        expected = eval_tensor_grid(parts[ell], assignment, samples)
    else:
        expected = np.zeros(sample_count)
    return float(np.max(np.abs(rebuilt - expected)))


__all__ = [
    "IndexName",
    "L_MAX",
    "LegendreCoeffs",
    "Side",
    "TensorExpr",
    "TensorTerm",
    "angular_average",
    "angular_momentum",
    "components",
    "contract",
    "decompose",
    "default_indices",
    "eval_tensor",
    "eval_tensor_grid",
    "hat_monomial",
    "index_key",
    "kronecker",
    "legendre_coeffs",
    "pairings",
    "sphere_rule",
    "symmetric_sum",
    "traceless_top",
    "ylm_cross_check",
]
