from __future__ import annotations

import json
import random
from fractions import Fraction as F

import pytest

from poissonred.checks import random_element
from poissonred.cli import main
from poissonred.expr import ParseError, parse_ast, parse_expr
from poissonred.models import MODEL_NAMES, build_model
from poissonred.suites import UnknownSuiteError, run_suite


def test_parse_examples():
    cone = build_model("cone")
    f = parse_expr("s3^2 - s1*s2", cone.algebra)
    assert f == cone.relation
    assert cone.algebra.normal_form(f).is_zero()
    assert parse_expr("sqrt(s1)", cone.algebra) == cone.ring.gen("s1", F(1, 2))
    with pytest.raises(ParseError) as err:
        parse_expr("s1 ^", cone.algebra)
    assert err.value.position == 4


@pytest.mark.parametrize(
    "text, pos",
    [("s1 s2", 3), ("s1 + $", 5), ("foo + s1", 0), ("s1^(1/3)", 0), ("s3^(1/2)", 0), ("(s1", 3)],
)
def test_parse_errors(text, pos):
    cone = build_model("cone")
    with pytest.raises(ParseError) as err:
        parse_expr(text, cone.algebra)
    assert err.value.position == pos


def test_parse_forms():
    m = build_model("matrices")
    g = parse_expr("gamma - (1/2)*alpha1*beta1", m.algebra, normalize=True)
    assert g == 2 * m.ring["w"] ** 2
    assert parse_expr("w^-3", m.algebra) == m.ring.gen("w", -3)
    k3 = build_model("k3-II")
    assert parse_expr("-x1^{2}", k3.algebra) == -k3.ring["x1"] ** 2
    assert parse_ast("2*-x") == ("mul", ("num", F(2)), ("neg", ("gen", "x", 3)))
    with pytest.raises(ParseError):
        parse_expr("alpha1^-1", m.algebra)


@pytest.mark.parametrize("name", MODEL_NAMES)
def test_round_trip(name):
    model = build_model(name)
    rng = random.Random(f"round-{name}")
    for _ in range(100):
        p = random_element(model, rng)
        assert parse_expr(p.to_text(), model.algebra) == p


def test_suite_determinism_and_errors():
    a = run_suite("k3", 7).to_json()
    b = run_suite("k3", 7).to_json()
    assert a == b
    with pytest.raises(UnknownSuiteError):
        run_suite("bogus", 7)


def test_exit_code_contract():
    rep = run_suite("darboux", 7)
    failed = [c for c in rep.checks if c.status == "fail"]
    assert rep.exit_code == (1 if failed else 0)


def test_cli_commands(capsys, tmp_path):
    assert main(["models", "list"]) == 0
    assert main(["expr", "eval", "--model", "matrices", "-e", "w^5"]) == 0
    assert capsys.readouterr().out.splitlines()[-1] == "alphat*betat*w"
    assert main(["bracket", "-m", "cone", "-f", "s1", "-g", "s2"]) == 0
    assert capsys.readouterr().out.strip() == "4*s1^{1/2}*s2^{1/2}"
    assert main(["star", "-m", "cone", "--order", "2", "-f", "sqrt(s1)", "-g", "sqrt(s2)"]) == 0
    assert capsys.readouterr().out.splitlines()[1] == "t^1: 1"
    assert main(["assoc", "-m", "cone", "--order", "3", "--trials", "2", "--seed", "1"]) == 0
    path = tmp_path / "k3.json"
    assert main(["verify", "matrices", "--seed", "3", "--json", str(path)]) == 0
    data = json.loads(path.read_text())
    assert data["suite"] == "matrices" and data["seed"] == 3 and data["summary"]["fail"] == 0
    out = tmp_path / "conv.json"
    assert main(["converge", "--sigma", "1", "--grid", "s=0.2;t=0.1", "--json", str(out)]) == 0
    assert json.loads(out.read_text())["points"][0]["verdict"] == "converged"
    assert main(["converge", "--grid", "s=0.1:0.2:2;t=0.05", "--order", "12", "--json", str(out)]) == 0
    assert all(p["in_theorem_ball"] is True for p in json.loads(out.read_text())["points"])


def test_cli_usage_errors(capsys):
    assert main(["expr", "eval", "-m", "cone", "-e", "s1 ^"]) == 2
    assert "position 4" in capsys.readouterr().err
    assert main(["expr", "eval", "-m", "nowhere", "-e", "1"]) == 2
    assert main(["star", "-m", "k3-III", "-f", "x1", "-g", "x2"]) == 2
    assert main(["converge", "--grid", "s=0"]) == 2
    assert main(["expr", "eval", "-m", "cone", "-e", "s1/2"]) == 2
    assert "implicit" not in capsys.readouterr().err
    with pytest.raises(SystemExit) as exc:
        main(["verify", "bogus"])
    assert exc.value.code == 2


def test_cli_seed_from_environment(monkeypatch, capsys):
    monkeypatch.setenv("POISSONRED_SEED", "11")
    assert main(["verify", "k3"]) == 0
    assert "seed=11" in capsys.readouterr().out
