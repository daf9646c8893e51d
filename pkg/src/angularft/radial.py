"""Numeric radial machinery: spherical Bessel functions, cutoff-regulated
integrals, the delta-representation family and the Yukawa check."""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Iterable, Sequence
from functools import lru_cache

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import integrate, special

from .errors import DomainError, QuadratureError
from .exact import double_factorial
from .models import DeltaRepSeries, QuadratureConfig, RadialSpec, YukawaRow

logger = logging.getLogger(__name__)

FloatArray = NDArray[np.float64]


def _series(ell: int, x: FloatArray) -> FloatArray:
    # x**ell/(2l+1)!! * sum_k (-x**2/2)**k / (k! (2l+3)(2l+5)...(2l+2k+1))
    total = np.ones_like(x)
    term = np.ones_like(x)
    half_sq = -0.5 * x * x
    for k in range(1, 200):
        term = term * half_sq / (k * (2 * ell + 2 * k + 1))
        total += term
        if np.all(np.abs(term) <= 1e-17 * np.abs(total)):
            break
    return x**ell / double_factorial(2 * ell + 1) * total


def _upward(ell: int, x: FloatArray) -> FloatArray:
    # stable while every order stays below the argument
    j_prev = np.sin(x) / x
    if ell == 0:
        return j_prev
    j_cur = np.sin(x) / x**2 - np.cos(x) / x
    for order in range(1, ell):
        j_prev, j_cur = j_cur, (2 * order + 1) / x * j_cur - j_prev
    return j_cur


def sph_bessel(ell: int, x: ArrayLike) -> float | FloatArray:
    """Spherical Bessel function ``j_ell(x)`` for ``x >= 0``.

    Uses the power series below ``x = ell + 2`` and the recurrence from
    ``j_0 = sin x / x`` and ``j_1`` above it.  Scalars in, scalar out.
    """
    if ell < 0:
        raise DomainError(f"negative order {ell}")
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0):
        raise DomainError("spherical Bessel argument must be non-negative")
    flat = np.atleast_1d(arr).ravel()
    out = np.empty_like(flat)
    small = flat < ell + 2
    out[small] = _series(ell, flat[small])
    out[~small] = _upward(ell, flat[~small])
    if arr.ndim == 0:
        return float(out[0])
    return out.reshape(arr.shape)


@lru_cache(maxsize=None)
def _gauss_legendre(order: int) -> tuple[FloatArray, FloatArray]:
    return np.polynomial.legendre.leggauss(order)


def _panel(f: Callable[[FloatArray], FloatArray], a: float, b: float, order: int) -> float:
    nodes, weights = _gauss_legendre(order)
    half = 0.5 * (b - a)
    return float(half * np.dot(weights, f(half * nodes + 0.5 * (a + b))))


def _euler_average(partials: Sequence[float]) -> float:
    # repeated averaging of consecutive partial sums of an alternating series
    values = list(partials)
    while len(values) > 1:
        values = [0.5 * (a + b) for a, b in zip(values, values[1:])]
    return values[0]


def regulated_radial(spec: RadialSpec, cfg: QuadratureConfig | None = None) -> float:
    """``int_0^inf exp(-lam p) p**(n+2) j_ell(p r) dp`` by oscillatory quadrature.

    The integral is taken in ``x = p r``.  The range beyond the turning region
    is split at the zeros of ``sin(x - pi ell / 2)``, each half period gets a
    Gauss-Legendre panel, and the alternating partial sums are accelerated by
    Euler averaging.
    """
    cfg = cfg or QuadratureConfig()
    n, ell = spec.n, spec.ell
    eps = spec.lam / spec.r
    scale = spec.r ** -(n + 3)

    def integrand(x: FloatArray) -> FloatArray:
        return np.exp(-eps * x) * x ** (n + 2) * sph_bessel(ell, x)

    phase = 0.5 * math.pi * ell
    start = phase + math.pi * max(0, math.ceil((ell + 2 - phase) / math.pi))
    head_panels = max(1, math.ceil(start / math.pi))
    edges = np.linspace(0.0, start, head_panels + 1)
    total = sum(_panel(integrand, a, b, cfg.gauss_order) for a, b in zip(edges, edges[1:]))

    partials = [total]
    window = cfg.acceleration_terms + 1
    previous: float | None = None
    settled = 0
    estimate = total
    for k in range(cfg.max_oscillations):
        a = start + k * math.pi
        piece = _panel(integrand, a, a + math.pi, cfg.gauss_order)
        total += piece
        partials.append(total)
        if len(partials) < window:
            continue
        estimate = _euler_average(partials[-window:])
        tolerance = max(cfg.abs_tol, cfg.rel_tol * abs(estimate))
        if abs(piece) < 1e-3 * tolerance:
            logger.debug("regulated_radial %s: tail decayed after %d panels", spec, k + 1)
            return scale * total
        if previous is not None and abs(estimate - previous) <= tolerance:
            settled += 1
            if settled >= 2:
                logger.debug("regulated_radial %s: converged after %d panels", spec, k + 1)
                return scale * estimate
        else:
            settled = 0
        previous = estimate
    error = abs(estimate - previous) if previous is not None else math.inf
    raise QuadratureError(
        f"regulated integral for {spec} did not converge in {cfg.max_oscillations} oscillations",
        estimate=scale * estimate,
        error=scale * error,
    )


def _quad(f: Callable[[float], float], a: float, b: float, what: str, **kwargs: object) -> float:
    result = integrate.quad(f, a, b, full_output=1, **kwargs)
    if len(result) > 3:
        raise QuadratureError(f"{what}: {result[3]}", estimate=result[0], error=result[1])
    return float(result[0])


def _delta_rep_prefactor(ell: float) -> float:
    # 2**(l+2) (l+1)! / (pi (2l+1)!!) with both factorials continued by gamma
    return 2.0 * math.exp(special.gammaln(ell + 2) - special.gammaln(ell + 1.5)) / math.sqrt(math.pi)


def _check_delta_rep(ell: float, lam: float) -> None:
    if ell <= -1.5:
        raise DomainError(f"delta representation needs l > -3/2, got {ell}")
    if lam <= 0:
        raise DomainError(f"lambda must be positive, got {lam}")


def delta_rep(ell: float, lam: float, r: ArrayLike) -> float | FloatArray:
    """``R_ell(lam; r)``, a normalized family tending to ``delta(r)`` as ``lam -> 0``."""
    _check_delta_rep(ell, lam)
    arr = np.asarray(r, dtype=float)
    if np.any(arr < 0):
        raise DomainError("delta representation is defined for r >= 0")
    denom = arr * arr + lam * lam
    with np.errstate(divide="ignore"):
        value = _delta_rep_prefactor(ell) * (lam / denom) * (arr * arr / denom) ** (ell + 1)
    if arr.ndim == 0:
        return float(value)
    return value


def delta_rep_peak(ell: float, lam: float) -> float:
    """Analytic maximum of ``R_ell(lam; r)``, at ``r = lam * sqrt(ell + 1)``."""
    _check_delta_rep(ell, lam)
    return lam * math.sqrt(ell + 1)


def _scaled_integral(ell: float, lam: float, f: Callable[[float], float], what: str) -> float:
    # r = lam * t keeps the peak at t = sqrt(l + 1) whatever lambda is
    split = 10.0 * math.sqrt(ell + 1)

    def integrand(t: float) -> float:
        return f(lam * t) * lam * float(delta_rep(ell, lam, lam * t))

    kwargs = {"epsabs": 1e-12, "epsrel": 1e-11, "limit": 200}
    return _quad(integrand, 0.0, split, what, **kwargs) + _quad(
        integrand, split, math.inf, what, **kwargs
    )


def delta_rep_norm(ell: float, lam: float) -> float:
    """``int_0^inf R_ell(lam; r) dr``, which is one for every admissible ``ell``."""
    return _scaled_integral(ell, lam, lambda r: 1.0, "delta representation norm")


def sift(ell: float, lam: float, f: Callable[[float], float]) -> float:
    """``int_0^inf f(r) R_ell(lam; r) dr``; tends to ``f(0)`` as ``lam -> 0``."""
    _check_delta_rep(ell, lam)
    return _scaled_integral(ell, lam, f, "sifting integral")


def delta_rep_series(
    ells: Iterable[float], lam: float, r_max: float, count: int
) -> list[DeltaRepSeries]:
    """Sample ``R_ell(lam; r)`` on ``count`` points of ``[0, r_max]`` for each ``ell``."""
    if count < 2 or r_max <= 0:
        raise DomainError("need at least two samples on a positive range")
    grid = np.linspace(0.0, r_max, count)
    return [
        DeltaRepSeries(
            ell=ell,
            lam=lam,
            r=grid.tolist(),
            values=np.asarray(delta_rep(ell, lam, grid)).tolist(),
            peak=delta_rep_peak(ell, lam),
        )
        for ell in ells
    ]


def yukawa_check(p: float, lam: float) -> tuple[float, float]:
    """Screened Coulomb transform: quadrature against ``1/(p**2 + lam**2)``."""
    if p <= 0 or lam <= 0:
        raise DomainError(f"p and lambda must be positive, got p={p}, lambda={lam}")
    integral = _quad(
        lambda r: math.exp(-lam * r),
        0.0,
        math.inf,
        f"yukawa transform at p={p}, lambda={lam}",
        weight="sin",
        wvar=p,
        epsabs=1e-10,
        limlst=500,
    )
    return integral / p, 1.0 / (p * p + lam * lam)


def yukawa_sequence(p: float, lams: Iterable[float]) -> list[YukawaRow]:
    rows = []
    for lam in lams:
        lhs, rhs = yukawa_check(p, lam)
        rows.append(YukawaRow(p=p, lam=lam, lhs=lhs, rhs=rhs))
    return rows


__all__ = [
    "delta_rep",
    "delta_rep_norm",
    "delta_rep_peak",
    "delta_rep_series",
    "regulated_radial",
    "sift",
    "sph_bessel",
    "yukawa_check",
    "yukawa_sequence",
]
