from __future__ import annotations

from fractions import Fraction

import pytest

from angularft import api
from angularft.errors import DomainError, UnsupportedShapeError
from angularft.exact import ONE, ExactScalar
from angularft.tensor import (
    Side,
    TensorExpr,
    TensorTerm,
    decompose,
    default_indices,
    hat_monomial,
    kronecker,
)
from angularft.transform import (
    DELTA3,
    INV_R,
    INV_R2,
    IdentityKind,
    MomentumExpr,
    PositionExpr,
    PositionTerm,
    YlmTerm,
    apply_operator,
    derivative_identity,
    dipole_fields,
    forward,
    forward_delta_p,
    forward_result,
    forward_ylm,
    full_derivative_inv_r,
    gradient_form,
    inverse,
    inverse_ylm,
    poisson_identity,
    radial_delta_identity,
)


def _scalar(side: Side = Side.POSITION) -> TensorExpr:
    return TensorExpr.scalar(1, side)


@pytest.mark.parametrize(
    ("source", "name"),
    [
        ("p^-2", "transform_1a.txt"),
        ("p^-2 * p[i]", "transform_1b.txt"),
        ("p^-4 * p[i] * p[j]", "transform_1c.txt"),
        ("p^-2 * p[i] * p[j]", "transform_1d.txt"),
    ],
)
def test_headline_transforms(source, name, golden):
    assert api.transform(source).render() + "\n" == golden(name)


def test_coulomb_from_expression_object():
    result = forward(MomentumExpr(-2, _scalar(Side.MOMENTUM)))
    assert result.render() == "1/4*pi^-1 * r^-1 * (1)"
    assert result.terms[0].r_pow == -1
    assert not result.terms[0].delta3


def test_full_components_shift_power():
    full = MomentumExpr(-2, hat_monomial(("i",)), hat_normalized=False)
    hatted = MomentumExpr(-1, hat_monomial(("i",)))
    assert full.n_eff == -1
    assert forward(full) == forward(hatted)


@pytest.mark.parametrize("ell", range(5))
def test_forward_then_inverse_is_identity(ell):
    top = decompose(ell)[ell]
    for n in range(-(ell + 2), ell + 1):
        expr = MomentumExpr(n, top)
        assert inverse(forward(expr)).equivalent(expr.as_result()), (n, ell)


@pytest.mark.parametrize("rank", range(5))
def test_monomial_round_trip_mixes_angular_momenta(rank):
    lowest = rank % 2
    monomial = hat_monomial(default_indices(rank))
    for n in range(-(lowest + 2), lowest + 1):
        expr = MomentumExpr(n, monomial)
        assert inverse(forward(expr)).equivalent(expr.as_result()), (n, rank)


def test_delta_row_round_trip():
    for ell in range(4):
        top = decompose(ell, side=Side.POSITION)[ell]
        expr = PositionExpr.build([PositionTerm(ONE, ell, False, top)])
        momentum = inverse(expr)
        assert all(t.delta3p and t.p_pow == -ell for t in momentum.terms)
        assert forward_result(momentum).equivalent(expr)


def test_forward_delta_p_of_constant():
    result = forward_delta_p(_scalar(Side.MOMENTUM))
    assert result.coefficient(0, False, TensorTerm()) == ExactScalar(Fraction(1, 8), 0, -3)


def test_forward_is_linear():
    a = hat_monomial(("i", "j"))
    b = kronecker("i", "j")
    together = forward(MomentumExpr(-2, a + b))
    separate = forward(MomentumExpr(-2, a)) + forward(MomentumExpr(-2, b))
    assert together.equivalent(separate)


def test_trace_of_second_moment_is_delta():
    result = api.transform("p^-2 * p[i] * p[j]")
    assert result.contract("i", "j").equivalent(DELTA3)


def test_outside_strip_is_rejected():
    with pytest.raises(DomainError, match="outside framework"):
        forward(MomentumExpr(3, hat_monomial(("i",))))
    with pytest.raises(DomainError, match="outside framework"):
        forward(MomentumExpr(-3, _scalar(Side.MOMENTUM)))


def test_unsupported_inverse_shapes():
    with pytest.raises(UnsupportedShapeError, match="supported rows"):
        inverse(PositionExpr.build([PositionTerm(ONE, 1, True, _scalar())]))
    with pytest.raises(UnsupportedShapeError):
        inverse(PositionExpr.build([PositionTerm(ONE, 2, False, _scalar())]))


def test_ylm_terms():
    forward_term = forward_ylm(YlmTerm(ONE, -2, False, 0, 0, Side.MOMENTUM))
    assert forward_term.render() == "1/4*pi^-1 * r^-1 * Y[0,0]"
    back = inverse_ylm(forward_term)
    assert (back.coeff, back.power, back.delta, back.side) == (ONE, -2, False, Side.MOMENTUM)

    delta_term = forward_ylm(YlmTerm(ONE, 2, False, 2, 1, Side.MOMENTUM))
    assert delta_term.render() == "-15 * r^-2 * delta3 * Y[2,1]"
    with pytest.raises(DomainError):
        forward_ylm(delta_term)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_traceless_derivatives_of_inverse_r(k, golden):
    record = derivative_identity("inv_r", k)
    assert record.lhs_kind is IdentityKind.DERIV_INV_R
    assert record.render() + "\n" == golden(f"identity_inv_r_{k}.txt")


def test_derivative_of_inverse_square():
    record = derivative_identity("inv_r2", 1)
    assert record.rhs.render() == "-2 * r^-3 * (1 * h[i1])"


def test_derivative_of_delta():
    record = derivative_identity("delta3", 1)
    assert record.rhs.render() == "-3 * r^-1 * delta3 * (1 * h[i1])"


def test_derivative_identity_rejects_bad_input():
    with pytest.raises(DomainError):
        derivative_identity("inv_r3", 1)
    with pytest.raises(DomainError):
        derivative_identity("inv_r", 9)


def test_full_second_derivative_has_contact_term():
    record = full_derivative_inv_r(2)
    delta_term = TensorTerm((("i1", "i2"),), ())
    assert record.rhs.coefficient(0, True, delta_term) == ExactScalar(Fraction(-4, 3), 0, 1)
    assert record.rhs.coefficient(-3, False, TensorTerm((), ("i1", "i2"))) == ExactScalar(3)


def test_full_derivative_order_limits():
    with pytest.raises(DomainError, match="out of scope"):
        full_derivative_inv_r(4)
    with pytest.raises(DomainError):
        full_derivative_inv_r(0)


def test_dipole_fields():
    electric, magnetic = dipole_fields()
    assert electric.vector == "p"
    assert magnetic.vector == "m"
    assert electric.rhs.equivalent(full_derivative_inv_r(2, ("i", "j")).rhs)

    operator = hat_monomial(("i", "j")) - kronecker("i", "j")
    assert magnetic.rhs.equivalent(apply_operator(INV_R, operator, 2))
    delta_term = TensorTerm((("i", "j"),), ())
    assert magnetic.rhs.coefficient(0, True, delta_term) == ExactScalar(Fraction(8, 3), 0, 1)
    assert "contracted with m[j]" in magnetic.render_lhs()


def test_poisson_identity():
    record = poisson_identity()
    assert record.rhs.equivalent(DELTA3)
    assert record.order == 2


def test_radial_delta_identity():
    record = radial_delta_identity()
    assert record.lhs_kind is IdentityKind.RADIAL_DELTA
    assert record.rhs.equivalent(DELTA3)


def test_gradient_form_peels_one_derivative():
    record = derivative_identity("inv_r2", 1)
    peeled = gradient_form(record)
    assert peeled.equivalent(INV_R2.outer(kronecker("k", "i1")))
    with pytest.raises(DomainError):
        gradient_form(record, slot="i1")
    with pytest.raises(DomainError):
        gradient_form(radial_delta_identity())


def test_to_json_shape():
    payload = api.transform("p^-2").to_json()
    assert payload == [
        {
            "coeff": {"rational": "1/4", "i_pow": 0, "pi_pow": -1},
            "r_pow": -1,
            "delta3": False,
            "angular": "1",
        }
    ]
