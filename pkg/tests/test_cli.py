from __future__ import annotations

import json
from io import StringIO

import pytest

from angularft.cli import main


def _run(*args: str) -> tuple[int, str, str]:
    stdout = StringIO()
    stderr = StringIO()
    rc = main(list(args), stdout=stdout, stderr=stderr)
    return rc, stdout.getvalue(), stderr.getvalue()


@pytest.mark.parametrize(
    ("expr", "name"),
    [
        ("p^-2", "transform_1a.txt"),
        ("p^-2 * p[i]", "transform_1b.txt"),
        ("p^-4 * p[i] * p[j]", "transform_1c.txt"),
        ("p^-2 * p[i] * p[j]", "transform_1d.txt"),
    ],
)
def test_cli_transform(expr, name, golden):
    rc, out, err = _run("transform", expr)

    assert rc == 0
    assert out == golden(name)
    assert err == ""


@pytest.mark.parametrize("rank", [2, 3, 4, 5])
def test_cli_decompose(rank, golden):
    rc, out, _ = _run("decompose", str(rank))

    assert rc == 0
    assert out == golden(f"decompose_{rank}.txt")


@pytest.mark.parametrize("k", [1, 2, 3])
def test_cli_identity(k, golden):
    rc, out, _ = _run("identity", "inv_r", str(k))

    assert rc == 0
    assert out == golden(f"identity_inv_r_{k}.txt")


def test_cli_inverse():
    rc, out, _ = _run("inverse", "r^-1")

    assert rc == 0
    assert out.strip() == "4*pi * p^-2 * (1)"


def test_cli_chi_json():
    rc, out, _ = _run("chi", "-2", "0", "--format", "json")

    assert rc == 0
    payload = json.loads(out)
    assert set(payload) == {"command", "inputs", "result_terms", "diagnostics", "verdict"}
    assert payload["command"] == "chi"
    assert payload["inputs"] == {"n": -2, "l": 0}
    assert payload["result_terms"] == [{"rational": "1/2", "i_pow": 0, "pi_pow": 1}]
    assert payload["diagnostics"]["region"] == "regular"
    assert payload["diagnostics"]["float"] == pytest.approx(1.5707963267948966)
    assert payload["verdict"] is True


def test_cli_chi_text():
    rc, out, _ = _run("chi", "0", "2")

    assert rc == 0
    assert out.strip() == "chi(0,2) = 3/2*pi"


def test_cli_transform_json():
    rc, out, _ = _run("transform", "p^-2 * p[i]", "--format", "json")

    assert rc == 0
    payload = json.loads(out)
    assert payload["result_terms"] == [
        {
            "coeff": {"rational": "1/4", "i_pow": 1, "pi_pow": -1},
            "r_pow": -2,
            "delta3": False,
            "angular": "1 * h[i]",
        }
    ]


def test_cli_parse_error():
    rc, out, err = _run("transform", "p^-2 *")

    assert rc == 2
    assert out == ""
    assert err.startswith("Error: unexpected end of input at offset 6")


def test_cli_domain_error():
    rc, out, err = _run("transform", "p^3")

    assert rc == 1
    assert out == ""
    assert "outside framework" in err


def test_cli_identity_domain_error():
    rc, _, err = _run("identity", "full_inv_r", "4")

    assert rc == 1
    assert "out of scope" in err


def test_cli_unknown_kind():
    with pytest.raises(SystemExit) as exc:
        main(["identity", "inv_r4", "1"], stdout=StringIO(), stderr=StringIO())
    assert exc.value.code == 2


def test_cli_radial_json():
    rc, out, _ = _run("radial", "-2", "0", "1.0", "--lambda", "0.01", "--format", "json")

    assert rc == 0
    diagnostics = json.loads(out)["diagnostics"]
    assert abs(diagnostics["ratio"] - 1.0) <= diagnostics["bound"]


def test_cli_selftest():
    rc, out, _ = _run("selftest")

    assert rc == 0
    lines = out.splitlines()
    assert len(lines) == 5
    assert all(line.startswith("PASS ") for line in lines)


def test_cli_verify_failure_exit_code():
    rc, out, _ = _run("verify", "inv_r", "1", "--tol", "1e-300")

    assert rc == 3
    assert out.rstrip().endswith("verdict: fail")


@pytest.mark.slow
def test_cli_verify_delta():
    rc, out, _ = _run("verify", "delta3", "2", "--format", "json")

    assert rc == 0
    payload = json.loads(out)
    assert payload["verdict"] is True
    assert payload["inputs"]["ball_radius"] == 0.5
    assert len(payload["result_terms"]) == 5 * 6


def test_cli_series_and_yukawa():
    rc, out, _ = _run("series", "--ell", "0", "3", "--count", "11")
    assert rc == 0
    assert len(out.splitlines()) == 2

    rc, out, _ = _run("yukawa", "1.0", "--format", "json")
    assert rc == 0
    assert json.loads(out)["diagnostics"]["max_abs_diff"] < 1e-2
