from __future__ import annotations

import logging
from collections.abc import Callable, Sequence
from fractions import Fraction

from .errors import AngularFTError, DomainError, VerificationFailed
from .exact import ONE, PI, chi
from .models import BallConfig, SelftestCheck, VerificationReport
from .parser import ExprAst, parse_expr
from .tensor import Side, TensorExpr, components, contract, decompose, hat_monomial
from .transform import (
    IdentityRecord,
    MomentumExpr,
    MomentumResult,
    MomentumTerm,
    PositionExpr,
    PositionTerm,
    YlmTerm,
    derivative_identity,
    dipole_fields,
    forward,
    forward_result,
    forward_ylm,
    full_derivative_inv_r,
    inverse,
    inverse_ylm,
    poisson_identity,
    radial_delta_identity,
)
from .verify import TestFunction, gaussian_family, pair_delta, verify_identity

logger = logging.getLogger(__name__)

IDENTITY_KINDS = (
    "inv_r",
    "inv_r2",
    "delta3",
    "full_inv_r",
    "dipole_E",
    "dipole_B",
    "poisson",
    "radial_delta",
)


def _angular(ast: ExprAst, side: Side) -> TensorExpr:
    return hat_monomial(ast.indices, side)


def _ylm(ast: ExprAst) -> YlmTerm | None:
    factor = ast.ylm
    if factor is None:
        return None
    return YlmTerm(ONE, ast.power, ast.delta, factor.ell, factor.m, ast.side)


def _require_side(ast: ExprAst, side: Side) -> None:
    if ast.side is not side:
        raise DomainError(f"expected a {side} expression, got a {ast.side} one")


def momentum_input(ast: ExprAst) -> MomentumExpr | MomentumResult:
    """Turn a parsed momentum expression into the transform input."""
    _require_side(ast, Side.MOMENTUM)
    angular = _angular(ast, Side.MOMENTUM)
    if ast.delta:
        term = MomentumTerm(ONE, ast.power + ast.full_count, True, angular)
        return MomentumResult.build([term])
    return MomentumExpr(ast.power + ast.full_count, angular)


def position_input(ast: ExprAst) -> PositionExpr:
    _require_side(ast, Side.POSITION)
    angular = _angular(ast, Side.POSITION)
    return PositionExpr.build([PositionTerm(ONE, ast.power + ast.full_count, ast.delta, angular)])


def transform(source: str) -> PositionExpr | YlmTerm:
    """Fourier transform a momentum-space expression given as text."""
    ast = parse_expr(source)
    ylm = _ylm(ast)
    if ylm is not None:
        _require_side(ast, Side.MOMENTUM)
        return forward_ylm(ylm)
    expr = momentum_input(ast)
    if isinstance(expr, MomentumResult):
        return forward_result(expr)
    return forward(expr)


def inverse_transform(source: str) -> MomentumResult | YlmTerm:
    """Inverse transform a coordinate-space expression given as text."""
    ast = parse_expr(source)
    ylm = _ylm(ast)
    if ylm is not None:
        _require_side(ast, Side.POSITION)
        return inverse_ylm(ylm)
    return inverse(position_input(ast))


def identity(kind: str, k: int) -> IdentityRecord:
    """Look up a derivative identity by CLI name."""
    if kind in ("inv_r", "inv_r2", "delta3"):
        return derivative_identity(kind, k)
    if kind == "full_inv_r":
        return full_derivative_inv_r(k)
    if kind in ("dipole_E", "dipole_B"):
        if k != 2:
            raise DomainError(f"{kind} is a second-derivative identity, got k={k}")
        electric, magnetic = dipole_fields()
        return electric if kind == "dipole_E" else magnetic
    if kind == "poisson":
        if k != 2:
            raise DomainError(f"poisson is a second-derivative identity, got k={k}")
        return poisson_identity()
    if kind == "radial_delta":
        if k != 0:
            raise DomainError(f"radial_delta has no derivatives, got k={k}")
        return radial_delta_identity()
    raise DomainError(f"unknown identity kind {kind!r}; expected one of {', '.join(IDENTITY_KINDS)}")


def verify(
    kind: str,
    k: int,
    tol: float = 1e-6,
    cfg: BallConfig | None = None,
    family: Sequence[TestFunction] | None = None,
    strict: bool = False,
) -> VerificationReport:
    """Verify an identity against the test family.

    With ``strict`` a failing verdict raises ``VerificationFailed``.
    """
    report = verify_identity(identity(kind, k), family, tol, cfg)
    if strict and not report.verdict:
        worst = report.diagnostics.get("max_rel_diff", float("nan"))
        raise VerificationFailed(f"{report.identity} failed: max relative difference {worst:.3g}")
    return report


_HEADLINE_TRANSFORMS = {
    "p^-2": "1/4*pi^-1 * r^-1 * (1)",
    "p^-2 * p[i]": "1/4*i*pi^-1 * r^-2 * (1 * h[i])",
    "p^-4 * p[i] * p[j]": (
        "-1/8*pi^-1 * r^-1 * (1 * h[i]*h[j] + -1/3 * d[i,j])\n"
        "1/12*pi^-1 * r^-1 * (1 * d[i,j])"
    ),
    "p^-2 * p[i] * p[j]": (
        "-3/4*pi^-1 * r^-3 * (1 * h[i]*h[j] + -1/3 * d[i,j])\n"
        "1/3 * r^0 * delta3 * (1 * d[i,j])"
    ),
}


def _check_chi() -> str:
    expected = {(-2, 0): PI * Fraction(1, 2), (0, 2): PI * Fraction(3, 2), (-1, 0): ONE}
    bad = [f"chi{key}" for key, value in expected.items() if chi(*key) != value]
    for ell in range(7):
        if not chi(ell, ell).is_zero:
            bad.append(f"chi({ell},{ell})")
        for n in range(-(ell + 2), ell):
            if chi(n, ell) * chi(-(n + 3), ell) != PI * Fraction(1, 2):
                bad.append(f"reciprocity({n},{ell})")
    return ", ".join(bad)


def _check_decomposition() -> str:
    bad = []
    for rank in range(7):
        parts = decompose(rank)
        total = sum(parts.values(), TensorExpr.build(parts[rank].indices, {}))
        if total != hat_monomial(parts[rank].indices):
            bad.append(f"completeness L={rank}")
        top = parts[rank]
        if rank >= 2 and not contract(top, "i1", "i2").is_zero:
            bad.append(f"traceless L={rank}")
        if list(components(top)) != [rank]:
            bad.append(f"pure L={rank}")
    return ", ".join(bad)


def _check_transforms() -> str:
    return ", ".join(
        source for source, text in _HEADLINE_TRANSFORMS.items() if transform(source).render() != text
    )


def _check_delta_pairing() -> str:
    bad = []
    for fn in gaussian_family():
        term = PositionTerm(ONE, 0, True, TensorExpr.scalar(1, Side.POSITION))
        if abs(pair_delta(term, fn) - fn.derivative((0, 0, 0))) > 1e-14:
            bad.append(fn.label)
    return ", ".join(bad)


def _check_delta_row() -> str:
    # the r^l row and the delta(p) row are inverse to each other
    bad = []
    for ell in range(4):
        names = tuple(f"i{k}" for k in range(1, ell + 1))
        top = decompose(ell, names, Side.POSITION)[ell]
        expr = PositionExpr.build([PositionTerm(ONE, ell, False, top)])
        if not forward_result(inverse(expr)).equivalent(expr):
            bad.append(f"l={ell}")
    return ", ".join(bad)


_SELFTEST: tuple[tuple[str, Callable[[], str]], ...] = (
    ("chi table and reciprocity", _check_chi),
    ("decomposition L<=6", _check_decomposition),
    ("headline transforms", _check_transforms),
    ("delta pairing", _check_delta_pairing),
    ("delta(p) row round trip", _check_delta_row),
)


def selftest() -> list[SelftestCheck]:
    """Run the fast exact property checks; each returns a failure summary or ``""``."""
    results = []
    for name, check in _SELFTEST:
        try:
            detail = check()
        except AngularFTError as exc:
            detail = f"{type(exc).__name__}: {exc}"
        results.append(SelftestCheck(name=name, passed=not detail, detail=detail))
        logger.info("selftest %s: %s", name, "pass" if not detail else detail)
    return results


__all__ = [
    "IDENTITY_KINDS",
    "identity",
    "inverse_transform",
    "momentum_input",
    "position_input",
    "selftest",
    "transform",
    "verify",
]
