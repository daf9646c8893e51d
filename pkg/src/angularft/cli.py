from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from collections.abc import Callable, Sequence
from typing import Any, TextIO

from . import api
from .errors import AngularFTError, ParseError
from .exact import chi, chi_float, classify
from .models import BallConfig, RadialSpec
from .radial import delta_rep_series, regulated_radial, yukawa_sequence
from .tensor import decompose
from .transform import YlmTerm

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_PARSE = 2
EXIT_VERIFY = 3


@dataclasses.dataclass(slots=True)
class Outcome:
    """What a verb produced, before formatting."""

    inputs: dict[str, Any]
    text: str
    result_terms: list[Any]
    diagnostics: dict[str, Any] = dataclasses.field(default_factory=dict)
    verdict: bool = True


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--format",
        choices=("text", "json"),
        default="text",
        help="Output format (default: text).",
    )
    common.add_argument(
        "-v",
        "--verbose",
        action="count",
        default=0,
        help="Log progress on stderr; repeat for debug output.",
    )

    parser = argparse.ArgumentParser(
        prog="angularft",
        description="Exact Fourier transforms of p^n times angular monomials in three dimensions.",
    )
    verbs = parser.add_subparsers(dest="command", required=True)

    sub = verbs.add_parser("transform", parents=[common], help="Momentum to coordinate space.")
    sub.add_argument("expr", help='Momentum expression, e.g. "p^-2 * p[i] * p[j]".')

    sub = verbs.add_parser("inverse", parents=[common], help="Coordinate to momentum space.")
    sub.add_argument("expr", help='Coordinate expression, e.g. "r^-1".')

    sub = verbs.add_parser("decompose", parents=[common], help="Angular-momentum parts of a monomial.")
    sub.add_argument("rank", type=int, help="Number of unit-vector factors L.")

    sub = verbs.add_parser("chi", parents=[common], help="Exact chi_{n l}.")
    sub.add_argument("n", type=int)
    sub.add_argument("ell", type=int, metavar="l")

    sub = verbs.add_parser("radial", parents=[common], help="Cutoff-regulated radial integral.")
    sub.add_argument("n", type=int)
    sub.add_argument("ell", type=int, metavar="l")
    sub.add_argument("r", type=float)
    sub.add_argument("--lambda", dest="lam", type=float, default=1e-2, help="Cutoff (default 1e-2).")

    sub = verbs.add_parser("identity", parents=[common], help="Derivative identity expansion.")
    sub.add_argument("kind", choices=api.IDENTITY_KINDS)
    sub.add_argument("k", type=int)

    sub = verbs.add_parser("verify", parents=[common], help="Check an identity with test functions.")
    sub.add_argument("kind", choices=api.IDENTITY_KINDS)
    sub.add_argument("k", type=int)
    sub.add_argument("--tol", type=float, default=1e-6, help="Relative tolerance (default 1e-6).")
    sub.add_argument("--ball-radius", type=float, default=None, help="Radial split radius R.")

    verbs.add_parser("selftest", parents=[common], help="Run the fast exact property checks.")

    sub = verbs.add_parser("series", parents=[common], help="Sample the delta representation.")
    sub.add_argument("--ell", type=float, nargs="+", default=[0.0, 3.0, 10.0])
    sub.add_argument("--lambda", dest="lam", type=float, default=0.04)
    sub.add_argument("--r-max", type=float, default=0.5)
    sub.add_argument("--count", type=int, default=51)

    sub = verbs.add_parser("yukawa", parents=[common], help="Screened Coulomb transform check.")
    sub.add_argument("p", type=float)
    sub.add_argument("--lambda", dest="lam", type=float, nargs="+", default=[1.0, 0.5, 0.2, 0.05])
    return parser


def _expression_outcome(ns: argparse.Namespace, result: Any) -> Outcome:
    if isinstance(result, YlmTerm):
        terms: list[Any] = [
            {
                "coeff": result.coeff.to_json(),
                "power": result.power,
                "delta": result.delta,
                "ell": result.ell,
                "m": result.m,
                "side": str(result.side),
            }
        ]
    else:
        terms = result.to_json()
    return Outcome({"expr": ns.expr}, result.render(), terms)


def _run_transform(ns: argparse.Namespace) -> Outcome:
    return _expression_outcome(ns, api.transform(ns.expr))


def _run_inverse(ns: argparse.Namespace) -> Outcome:
    return _expression_outcome(ns, api.inverse_transform(ns.expr))


def _run_decompose(ns: argparse.Namespace) -> Outcome:
    parts = decompose(ns.rank)
    lines = [f"l={ell}: {part.render()}" for ell, part in parts.items()]
    terms = [{"l": ell, "tensor": part.render()} for ell, part in parts.items()]
    return Outcome({"rank": ns.rank}, "\n".join(lines), terms)


def _run_chi(ns: argparse.Namespace) -> Outcome:
    region = classify(ns.n, ns.ell)
    value = chi(ns.n, ns.ell)
    return Outcome(
        {"n": ns.n, "l": ns.ell},
        f"chi({ns.n},{ns.ell}) = {value.render()}",
        [value.to_json()],
        {"region": str(region), "float": value.to_float()},
    )


def _run_radial(ns: argparse.Namespace) -> Outcome:
    spec = RadialSpec(ns.n, ns.ell, ns.r, ns.lam)
    value = regulated_radial(spec)
    diagnostics: dict[str, Any] = {"region": str(classify(ns.n, ns.ell))}
    lines = [f"integral = {value!r}"]
    if ns.n < ns.ell:
        limit = chi_float(ns.n, ns.ell) * ns.r ** -(ns.n + 3)
        diagnostics.update(limit=limit, ratio=value / limit, bound=5 * ns.lam / ns.r)
        lines += [f"limit = {limit!r}", f"ratio = {value / limit!r}"]
    return Outcome(
        {"n": ns.n, "l": ns.ell, "r": ns.r, "lambda": ns.lam},
        "\n".join(lines),
        [{"value": value}],
        diagnostics,
    )


def _run_identity(ns: argparse.Namespace) -> Outcome:
    record = api.identity(ns.kind, ns.k)
    return Outcome({"kind": ns.kind, "k": ns.k}, record.render(), record.rhs.to_json())


def _run_verify(ns: argparse.Namespace) -> Outcome:
    cfg = BallConfig()
    if ns.ball_radius is not None:
        cfg = dataclasses.replace(cfg, R=ns.ball_radius)
    report = api.verify(ns.kind, ns.k, tol=ns.tol, cfg=cfg)
    lines = [
        f"{'PASS' if row.passed else 'FAIL'} {row.function} {row.assignment} "
        f"lhs={row.lhs:.12g} rhs={row.rhs:.12g} rel={row.rel_diff:.3g}"
        for row in report.rows
    ]
    lines.append(f"verdict: {'pass' if report.verdict else 'fail'}")
    return Outcome(
        {"kind": ns.kind, "k": ns.k, "tol": ns.tol, "ball_radius": cfg.R},
        "\n".join(lines),
        [dataclasses.asdict(row) for row in report.rows],
        report.diagnostics,
        report.verdict,
    )


def _run_selftest(ns: argparse.Namespace) -> Outcome:
    checks = api.selftest()
    lines = [
        f"{'PASS' if check.passed else 'FAIL'} {check.name}"
        + (f": {check.detail}" if check.detail else "")
        for check in checks
    ]
    return Outcome(
        {},
        "\n".join(lines),
        [dataclasses.asdict(check) for check in checks],
        verdict=all(check.passed for check in checks),
    )


def _run_series(ns: argparse.Namespace) -> Outcome:
    series = delta_rep_series(ns.ell, ns.lam, ns.r_max, ns.count)
    lines = [f"l={s.ell:g} lambda={s.lam:g} peak={s.peak!r} max={max(s.values)!r}" for s in series]
    return Outcome(
        {"ell": ns.ell, "lambda": ns.lam, "r_max": ns.r_max, "count": ns.count},
        "\n".join(lines),
        [dataclasses.asdict(s) for s in series],
    )


def _run_yukawa(ns: argparse.Namespace) -> Outcome:
    rows = yukawa_sequence(ns.p, ns.lam)
    lines = [f"lambda={row.lam:g} lhs={row.lhs!r} rhs={row.rhs!r}" for row in rows]
    return Outcome(
        {"p": ns.p, "lambda": ns.lam},
        "\n".join(lines),
        [dataclasses.asdict(row) for row in rows],
        {"max_abs_diff": max(abs(row.lhs - row.rhs) for row in rows)},
    )


_VERBS: dict[str, Callable[[argparse.Namespace], Outcome]] = {
    "transform": _run_transform,
    "inverse": _run_inverse,
    "decompose": _run_decompose,
    "chi": _run_chi,
    "radial": _run_radial,
    "identity": _run_identity,
    "verify": _run_verify,
    "selftest": _run_selftest,
    "series": _run_series,
    "yukawa": _run_yukawa,
}


def _configure_logging(verbosity: int, stream: TextIO) -> None:
    level = logging.WARNING if verbosity <= 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(level=level, stream=stream, format="%(levelname)s %(name)s: %(message)s")


def main(
    args: Sequence[str] | None = None,
    stdout: TextIO | None = None,
    stderr: TextIO | None = None,
) -> int:
    """Run the angularft CLI and return a process-style exit code.

    ``0`` on success, ``1`` on domain errors, ``2`` on parse errors and ``3``
    when a verification or self test fails.
    """
    out = sys.stdout if stdout is None else stdout
    err = sys.stderr if stderr is None else stderr

    parser = _build_parser()
    ns = parser.parse_args(args)
    _configure_logging(ns.verbose, err)

    try:
        outcome = _VERBS[ns.command](ns)
    except ParseError as exc:
        print(f"Error: {exc}", file=err)
        return EXIT_PARSE
    except AngularFTError as exc:
        print(f"Error: {exc}", file=err)
        return EXIT_DOMAIN

    if ns.format == "json":
        payload = {
            "command": ns.command,
            "inputs": outcome.inputs,
            "result_terms": outcome.result_terms,
            "diagnostics": outcome.diagnostics,
            "verdict": outcome.verdict,
        }
        print(json.dumps(payload, indent=2), file=out)
    else:
        print(outcome.text, file=out)
    return EXIT_OK if outcome.verdict else EXIT_VERIFY
