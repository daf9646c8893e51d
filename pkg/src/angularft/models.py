from __future__ import annotations

from dataclasses import dataclass, field

from .errors import DomainError
from .tensor import L_MAX


@dataclass(frozen=True, slots=True)
class RadialSpec:
    """Parameters of the regulated radial integral ``e^{-lam p} p^{n+2} j_ell(p r)``."""

    n: int
    ell: int
    r: float
    lam: float

    def __post_init__(self) -> None:
        if self.ell < 0:
            raise DomainError(f"negative angular momentum {self.ell}")
        if self.r <= 0 or self.lam <= 0:
            raise DomainError(f"r and lambda must be positive, got r={self.r}, lambda={self.lam}")
        if self.n <= -(self.ell + 3):
            raise DomainError(f"n={self.n} is not integrable at the origin for l={self.ell}")


@dataclass(frozen=True, slots=True)
class QuadratureConfig:
    """Budget and tolerances for the oscillatory radial quadrature."""

    abs_tol: float = 1e-12
    rel_tol: float = 1e-10
    max_oscillations: int = 20000
    acceleration_terms: int = 30
    gauss_order: int = 32

    def __post_init__(self) -> None:
        if self.abs_tol <= 0 or self.rel_tol <= 0:
            raise DomainError("quadrature tolerances must be positive")
        if self.max_oscillations < 8:
            raise DomainError("max_oscillations must be at least 8")
        if self.acceleration_terms < 1 or self.gauss_order < 2:
            raise DomainError("acceleration_terms and gauss_order are too small")


@dataclass(frozen=True, slots=True)
class BallConfig:
    """Quadrature layout for test-function pairings.

    The radial range is split at ``R``: Gauss-Legendre with ``radial_rule``
    nodes on ``[0, R]`` and ``tail_panels`` panels of the same order out to
    ``tail_widths`` Gaussian widths beyond the test-function centre.
    """

    R: float = 0.5
    radial_rule: int = 48
    angular_rule: tuple[int, int] = (20, 40)
    R_sequence: tuple[float, ...] = (0.2, 0.1, 0.05, 0.025)
    tail_widths: float = 7.0
    tail_panels: int = 6

    def __post_init__(self) -> None:
        if self.R <= 0 or any(radius <= 0 for radius in self.R_sequence):
            raise DomainError("ball radii must be positive")
        if self.radial_rule < 2 or self.tail_panels < 1:
            raise DomainError("radial rule is too small")
        n_theta, n_phi = self.angular_rule
        # exact for polynomials of degree 2 * L_MAX + 2 on the sphere
        degree = 2 * L_MAX + 2
        if 2 * n_theta - 1 < degree or n_phi - 1 < degree:
            raise DomainError(
                f"angular rule {self.angular_rule} is not exact to degree {degree}"
            )


@dataclass(slots=True)
class VerificationRow:
    """One test function and index assignment of a verification run."""

    function: str
    assignment: dict[str, int]
    lhs: float
    rhs: float
    abs_diff: float
    rel_diff: float
    passed: bool


@dataclass(slots=True)
class VerificationReport:
    """Outcome of pairing both sides of an identity with a test family."""

    identity: str
    tol: float
    rows: list[VerificationRow] = field(default_factory=list)
    diagnostics: dict[str, float] = field(default_factory=dict)

    @property
    def verdict(self) -> bool:
        return bool(self.rows) and all(row.passed for row in self.rows)


@dataclass(slots=True)
class BallSurfaceRow:
    """Surface and ball contributions of a gradient identity at radius ``R``."""

    R: float
    surface: float
    ball: float
    rhs_ball: float


@dataclass(slots=True)
class YukawaRow:
    p: float
    lam: float
    lhs: float
    rhs: float


@dataclass(slots=True)
class DeltaRepSeries:
    """Sampled delta-representation curve with its analytic peak position."""

    ell: float
    lam: float
    r: list[float]
    values: list[float]
    peak: float


@dataclass(slots=True)
class SelftestCheck:
    name: str
    passed: bool
    detail: str = ""
