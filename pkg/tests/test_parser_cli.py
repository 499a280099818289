"""Surface syntax parsing and the command-line front end."""

from __future__ import annotations

import json

import pytest

from qdirac.cli import EXIT_FAIL, EXIT_INPUT, EXIT_OK, main
from qdirac.errors import DimMismatch, ParseError
from qdirac.parser import parse, parse_mixed, parse_scalar
from qdirac.rewrite import Rewriter, render_nf
from qdirac.scalar import Scalar
from qdirac.term import (
    add, dag, gate, identity, ket0, ket1, ket_string, kron, mul, render, scale,
    zero,
)

from conftest import CORPUS_DIR


def nf(t):
    return Rewriter().normalize(t)


def test_parse_literals_and_sugar():
    assert parse("|0>") is ket0()
    assert parse("|0,1,1>") is ket_string("011")
    assert parse("<1|") is dag(ket1())
    assert parse("I(4)") is identity(4)
    assert parse("O(2,1)") is zero(2, 1)
    assert parse("H") is gate("H")
    assert parse("Mea0(1,0)") is gate("Mea0", 1, 0)
    assert parse("CE(u)") is gate("CE", "u")
    assert parse("uf(2)").dims == (8, 8)


def test_parse_precedence():
    assert parse("H # H * |0,0>") is mul(kron(gate("H"), gate("H")), ket_string("00"))
    assert parse("X^ * |0>") is mul(dag(gate("X")), ket0())
    assert parse("(|0> + |1>) # |0>") is kron(add(ket0(), ket1()), ket0())
    assert parse("|0> + |1> + |0>") is add(add(ket0(), ket1()), ket0())


def test_parse_scalar_forms():
    assert parse_scalar("1/2*sqrt2") == Scalar.inv_sqrt2()
    assert parse_scalar("a^*") == Scalar.conj_var("a")
    assert parse_scalar("conj(a)") == Scalar.conj_var("a")
    assert parse_scalar("e(-2*u)") == Scalar.phase("u", -2)
    assert parse_scalar("1/2 + -1/2*sqrt2*i") \
        == Scalar.rational(1, 2) - Scalar.inv_sqrt2() * Scalar.i()


def test_parse_scaled_terms():
    t = parse("1/2*sqrt2 .* (|0> + |1>)")
    assert t is scale(Scalar.inv_sqrt2(), add(ket0(), ket1()))
    assert render_nf(nf(t)) == "|+>"


def test_parse_mixed_states():
    m = parse_mixed("[1/2 : density(|0>) ; 1/2 : density(|1>)]")
    assert len(m.branches) == 2
    assert m.branches[0][0] == Scalar.rational(1, 2)
    m2 = parse_mixed("meamix(0, 0, mix1(density(|+>)))")
    assert [p for p, _ in m2.branches] == [Scalar.rational(1, 2)] * 2


def test_parse_error_positions():
    with pytest.raises(ParseError) as exc:
        parse("|0> +\n @")
    assert exc.value.line == 2 and exc.value.column == 2
    with pytest.raises(ParseError):
        parse("|0> |1>")
    with pytest.raises(ParseError):
        parse("unknown_gate")
    with pytest.raises(DimMismatch):
        parse("|0> * |0>")


def test_defs_are_visible():
    defs = {"psi": ket_string("01")}
    assert parse("CX * psi", defs) is mul(gate("CX"), ket_string("01"))


def test_round_trip_render_parse():
    cases = [
        kron(ket0(), ket1()),
        mul(kron(gate("H"), gate("H")), ket_string("01")),
        scale(Scalar.inv_sqrt2(), add(ket0(), scale(Scalar.i(), ket1()))),
        dag(mul(gate("CX"), kron(gate("H"), identity(2)))),
        add(gate("B0"), scale(Scalar.phase("u"), gate("B3"))),
    ]
    for t in cases:
        assert nf(parse(render(t))) == nf(t), render(t)


def test_cli_normalize(capsys):
    assert main(["normalize", "(H # H) * (|0> # |1>)"]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "|+> # |->"
    assert main(["normalize", "H * X * H"]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "Z"
    assert main(["normalize", "I(2)"]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "I(2)"


def test_cli_normalize_trace_and_json(capsys):
    assert main(["normalize", "X * |0>", "--trace"]) == EXIT_OK
    out = capsys.readouterr().out.strip().splitlines()
    assert out[-1] == "|1>"
    assert len(out) > 1
    assert main(["normalize", "X * |0>", "--json"]) == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert doc["normal_form"] == "|1>"
    assert doc["dims"] == [2, 1]


def test_cli_normalize_bad_input(capsys):
    assert main(["normalize", "H * (("]) == EXIT_INPUT
    assert "error:" in capsys.readouterr().err


def test_cli_check_passes(capsys):
    path = str(CORPUS_DIR / "bell.qd")
    assert main(["check", path]) == EXIT_OK
    out = capsys.readouterr().out
    assert "failed" in out and " 0 failed, 0 errors" in out


def test_cli_check_json_deterministic(capsys):
    path = str(CORPUS_DIR / "teleport.qd")
    args = ["check", path, "--seed", "42", "--json"]
    assert main(args) == EXIT_OK
    first = capsys.readouterr().out
    assert main(args) == EXIT_OK
    second = capsys.readouterr().out
    assert first == second
    doc = json.loads(first)
    assert doc["seed"] == 42
    assert all(r["verdict"] == "pass" for r in doc["files"][0]["results"])


def test_cli_check_corrupted_fails_with_witness(tmp_path, capsys):
    src = (CORPUS_DIR / "bell.qd").read_text()
    bad = src.replace("|0,0>", "|0,1>", 1)
    assert bad != src
    p = tmp_path / "bad.qd"
    p.write_text(bad)
    assert main(["check", str(p)]) == EXIT_FAIL
    out = capsys.readouterr().out
    assert "FAIL" in out and "witness:" in out


def test_cli_check_missing_file(capsys):
    assert main(["check", "/nonexistent/nope.qd"]) == EXIT_INPUT
    assert "error:" in capsys.readouterr().err


def test_cli_bench_json_and_table(capsys):
    assert main(["bench", "bell", "--repeat", "1", "--json"]) == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert doc[0]["case"] == "bell"
    assert doc[0]["ms_symbolic"] >= 0
    assert main(["bench", "bell", "--repeat", "1"]) == EXIT_OK
    assert "bell" in capsys.readouterr().out


def test_cli_bench_unknown_case(capsys):
    assert main(["bench", "no_such_case"]) == EXIT_INPUT
    assert "error:" in capsys.readouterr().err
