from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from angularft.errors import DomainError, IndexArgumentError
from angularft.tensor import (
    L_MAX,
    Side,
    TensorExpr,
    TensorTerm,
    angular_average,
    angular_momentum,
    components,
    contract,
    decompose,
    default_indices,
    eval_tensor,
    eval_tensor_grid,
    hat_monomial,
    index_key,
    kronecker,
    legendre_coeffs,
    pairings,
    sphere_rule,
    symmetric_sum,
    traceless_top,
    ylm_cross_check,
)


def _coefficients(expr: TensorExpr) -> set[Fraction]:
    return {c for _, c in expr.terms}


def test_index_key_is_natural():
    names = ["i10", "i2", "j", "i1"]
    assert sorted(names, key=index_key) == ["i1", "i2", "i10", "j"]


def test_term_is_canonical():
    a = TensorTerm((("j", "i"),), ("k",))
    b = TensorTerm((("i", "j"),), ("k",))
    assert a == b
    assert a.render() == "d[i,j]*h[k]"


def test_build_rejects_foreign_indices():
    with pytest.raises(IndexArgumentError):
        TensorExpr.build(("i", "j"), {TensorTerm((), ("i",)): 1})
    with pytest.raises(IndexArgumentError):
        TensorExpr.build(("i", "i"), {})


def test_pairings_count():
    assert len(list(pairings(default_indices(6)))) == 15
    assert list(pairings(default_indices(3))) == []


@pytest.mark.parametrize(
    ("rank", "weight", "count"),
    [(0, Fraction(1), 1), (2, Fraction(1, 3), 1), (4, Fraction(1, 15), 3), (6, Fraction(1, 105), 15)],
)
def test_angular_average(rank: int, weight: Fraction, count: int):
    average = angular_average(default_indices(rank))
    assert len(average.terms) == count
    assert _coefficients(average) == {weight}


def test_angular_average_odd_is_zero():
    assert angular_average(default_indices(1)).is_zero
    assert angular_average(default_indices(5)).is_zero


def test_contract_rules():
    assert contract(kronecker("a", "b"), "a", "b") == TensorExpr.scalar(3)
    assert contract(hat_monomial(("a", "b")), "a", "b") == TensorExpr.scalar(1)
    chained = kronecker("a", "b").outer(kronecker("c", "d"))
    assert contract(chained, "b", "c") == kronecker("a", "d")
    assert contract(decompose(2, ("i", "j"))[2], "i", "j").is_zero


def test_contract_argument_errors():
    with pytest.raises(IndexArgumentError):
        contract(kronecker("a", "b"), "a", "a")
    with pytest.raises(IndexArgumentError):
        contract(kronecker("a", "b"), "a", "z")


@pytest.mark.parametrize(
    ("ell", "coeffs"),
    [
        (0, (Fraction(1),)),
        (1, (Fraction(0), Fraction(1))),
        (2, (Fraction(-1, 2), Fraction(0), Fraction(3, 2))),
        (3, (Fraction(0), Fraction(-3, 2), Fraction(0), Fraction(5, 2))),
    ],
)
def test_legendre_coeffs(ell: int, coeffs: tuple[Fraction, ...]):
    assert legendre_coeffs(ell).coeffs == coeffs


def test_legendre_normalization_and_parity():
    for ell in range(9):
        coeffs = legendre_coeffs(ell).coeffs
        assert sum(coeffs) == 1
        assert all(c == 0 for k, c in enumerate(coeffs) if (k - ell) % 2)
        assert legendre_coeffs(ell)(1.0) == pytest.approx(1.0)


def _weights_by_hats(expr: TensorExpr) -> dict[int, set[Fraction]]:
    out: dict[int, set[Fraction]] = {}
    for term, c in expr.terms:
        out.setdefault(len(term.hats), set()).add(c)
    return out


@pytest.mark.parametrize(
    ("rank", "expected"),
    [
        (2, {2: {2: {1}, 0: {Fraction(-1, 3)}}, 0: {0: {Fraction(1, 3)}}}),
        (3, {3: {3: {1}, 1: {Fraction(-1, 5)}}, 1: {1: {Fraction(1, 5)}}}),
        (
            4,
            {
                4: {4: {1}, 2: {Fraction(-1, 7)}, 0: {Fraction(1, 35)}},
                2: {2: {Fraction(1, 7)}, 0: {Fraction(-2, 21)}},
                0: {0: {Fraction(1, 15)}},
            },
        ),
        (
            5,
            {
                5: {5: {1}, 3: {Fraction(-1, 9)}, 1: {Fraction(1, 63)}},
                3: {3: {Fraction(1, 9)}, 1: {Fraction(-2, 45)}},
                1: {1: {Fraction(1, 35)}},
            },
        ),
    ],
)
def test_decompose_coefficients(rank: int, expected: dict[int, dict[int, set[Fraction]]]):
    parts = decompose(rank)
    assert list(parts) == sorted(expected, reverse=True)
    for ell, weights in expected.items():
        assert _weights_by_hats(parts[ell]) == weights


def test_decompose_term_counts():
    parts = decompose(5)
    assert sum(1 for t, _ in parts[1].terms if len(t.hats) == 1) == 15
    assert sum(1 for t, _ in parts[5].terms if len(t.hats) == 3) == 10


@pytest.mark.parametrize("rank", range(L_MAX + 1))
def test_decompose_complete_and_traceless(rank: int):
    names = default_indices(rank)
    parts = decompose(rank)
    total = sum(parts.values(), TensorExpr.build(names, {}))
    assert total == hat_monomial(names)
    top = parts[rank]
    for a, b in itertools.combinations(names, 2):
        assert contract(top, a, b).is_zero


@pytest.mark.parametrize("rank", range(7))
def test_traceless_top_agrees_with_projection(rank: int):
    assert traceless_top(rank) == decompose(rank)[rank]


@pytest.mark.parametrize("rank", range(2, 6))
def test_second_component_is_delta_dressed_top(rank: int):
    names = default_indices(rank)
    total = TensorExpr.build(names, {})
    for a, b in itertools.combinations(names, 2):
        rest = [n for n in names if n not in (a, b)]
        total = total + traceless_top(rank - 2, rest).outer(kronecker(a, b))
    assert decompose(rank)[rank - 2] == total.scale(Fraction(1, 2 * rank - 1))


def test_decompose_rejects_bad_rank():
    with pytest.raises(DomainError):
        decompose(-1)
    with pytest.raises(DomainError):
        decompose(L_MAX + 1)
    with pytest.raises(IndexArgumentError):
        decompose(2, ("i",))


@settings(max_examples=25, deadline=None)
@given(st.permutations(default_indices(4)))
def test_decompose_symmetric_under_relabeling(perm: list[str]):
    names = default_indices(4)
    mapping = dict(zip(names, perm))
    for part in decompose(4).values():
        assert part.relabel(mapping) == part


def test_components_of_mixed_expression():
    expr = hat_monomial(("i", "j")) + kronecker("i", "j")
    parts = components(expr)
    assert parts[2] == decompose(2, ("i", "j"))[2]
    assert parts[0] == kronecker("i", "j").scale(Fraction(4, 3))
    assert angular_momentum(expr) is None
    assert angular_momentum(parts[2]) == 2


def test_side_is_carried():
    part = decompose(2, side=Side.POSITION)[2]
    assert part.side is Side.POSITION


@pytest.mark.parametrize(
    ("expr", "assignment", "vector", "expected"),
    [
        (decompose(2, ("i", "j"))[2], {"i": 3, "j": 3}, (0.0, 0.0, 1.0), 2 / 3),
        (decompose(2, ("i", "j"))[2], {"i": 1, "j": 2}, (0.0, 0.0, 1.0), 0.0),
        (decompose(3, ("i", "j", "k"))[3], {"i": 1, "j": 1, "k": 1}, (1.0, 0.0, 0.0), 0.4),
    ],
)
def test_eval_tensor(expr: TensorExpr, assignment: dict[str, int], vector: tuple[float, ...], expected: float):
    assert eval_tensor(expr, assignment, vector) == pytest.approx(expected, abs=1e-15)


def test_eval_tensor_errors():
    expr = kronecker("i", "j")
    with pytest.raises(IndexArgumentError):
        eval_tensor(expr, {"i": 1}, (1.0, 0.0, 0.0))
    with pytest.raises(IndexArgumentError):
        eval_tensor(expr, {"i": 1, "j": 4}, (1.0, 0.0, 0.0))
    with pytest.raises(IndexArgumentError):
        eval_tensor(expr, {"i": 1, "j": 1}, (1.0, 1.0, 0.0))


@settings(max_examples=30, deadline=None)
@given(
    st.lists(st.floats(min_value=-1, max_value=1), min_size=3, max_size=3),
    st.lists(st.integers(min_value=1, max_value=3), min_size=4, max_size=4),
)
def test_components_sum_to_monomial_numerically(raw: list[float], values: list[int]):
    vector = np.asarray(raw)
    norm = np.linalg.norm(vector)
    if norm < 1e-3:
        return
    vector = vector / norm
    names = default_indices(4)
    assignment = dict(zip(names, values))
    total = sum(eval_tensor_grid(part, assignment, vector) for part in decompose(4).values())
    assert float(total) == pytest.approx(float(np.prod(vector[np.asarray(values) - 1])), abs=1e-14)


def test_sphere_rule_weights():
    _, _, vectors, weights = sphere_rule(8, 16)
    assert weights.sum() == pytest.approx(4 * np.pi)
    assert np.allclose(np.linalg.norm(vectors, axis=-1), 1.0)
    second = np.sum(weights * vectors[..., 2] ** 2)
    assert second == pytest.approx(4 * np.pi / 3)


def test_symmetric_sum_counts():
    assert len(symmetric_sum(default_indices(4), 2).terms) == 6
    assert symmetric_sum(default_indices(3), 2).is_zero


@pytest.mark.parametrize(("rank", "ell"), [(0, 0), (2, 2), (2, 0), (3, 1), (3, 2), (4, 4)])
def test_ylm_cross_check(rank: int, ell: int):
    assert ylm_cross_check(rank, ell, 50) <= 1e-10
