from .api import identity, inverse_transform, selftest, transform, verify
from .cli import main
from .errors import (
    AngularFTError,
    DomainError,
    IndexArgumentError,
    ParseError,
    QuadratureError,
    RingError,
    SemanticError,
    UnpairedDeltaError,
    UnsupportedShapeError,
    VerificationFailed,
)
from .exact import ExactScalar, Region, chi, classify
from .models import BallConfig, QuadratureConfig, RadialSpec, VerificationReport
from .parser import ExprAst, parse_expr
from .radial import delta_rep, regulated_radial, sph_bessel, yukawa_check
from .tensor import TensorExpr, TensorTerm, decompose, traceless_top
from .transform import (
    IdentityRecord,
    MomentumExpr,
    MomentumResult,
    PositionExpr,
    PositionTerm,
    derivative_identity,
    dipole_fields,
    forward,
    full_derivative_inv_r,
    inverse,
)
from .verify import TestFunction, gaussian_family, verify_identity

__all__ = [
    "AngularFTError",
    "BallConfig",
    "DomainError",
    "ExactScalar",
    "ExprAst",
    "IdentityRecord",
    "IndexArgumentError",
    "MomentumExpr",
    "MomentumResult",
    "ParseError",
    "PositionExpr",
    "PositionTerm",
    "QuadratureConfig",
    "QuadratureError",
    "RadialSpec",
    "Region",
    "RingError",
    "SemanticError",
    "TensorExpr",
    "TensorTerm",
    "TestFunction",
    "UnpairedDeltaError",
    "UnsupportedShapeError",
    "VerificationFailed",
    "VerificationReport",
    "chi",
    "classify",
    "decompose",
    "delta_rep",
    "derivative_identity",
    "dipole_fields",
    "forward",
    "full_derivative_inv_r",
    "gaussian_family",
    "identity",
    "inverse",
    "inverse_transform",
    "main",
    "parse_expr",
    "regulated_radial",
    "selftest",
    "sph_bessel",
    "traceless_top",
    "transform",
    "verify",
    "verify_identity",
    "yukawa_check",
]
