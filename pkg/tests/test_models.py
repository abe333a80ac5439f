import json
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from covariant_rmatrix.models.cli import main
from covariant_rmatrix.models.expr import (Context, ForbiddenSymbol, ParseError, UnknownSymbol,
                                           UnsupportedTrigArgument, evaluate, parse_expression,
                                           parse_scalar, to_scalar)
from covariant_rmatrix.models.modelfile import (BUNDLED, CHECKS, bundled_path, load_model,
                                                parse_model, render)
from covariant_rmatrix.models.pipeline import emit_report, run_pipeline
from covariant_rmatrix.oracle import random_assignment
from covariant_rmatrix.scalar import I, eval_rational, field_jet, sin_of
from conftest import MODELS

CTX = Context(("phi", "q", "r"), ("beta", "m"))
J = field_jet


# --- expressions ---------------------------------------------------------------

def test_jet_suffix():
    assert parse_expression("phi_tt", CTX) == ("jet", "phi", 0, 2)
    assert parse_scalar("q_xxx", CTX) == J("q", 3)
    assert parse_scalar("d(q, x, 2) - q_xx", CTX).is_zero


def test_nls_density():
    got = parse_scalar("(i/2)*(r*d(q,t) - d(r,t)*q) - d(r,x)*d(q,x) - r^2*q^2", CTX)
    Q, R = J("q"), J("r")
    assert got == I / 2 * (R * J("q", 0, 1) - J("r", 0, 1) * Q) - J("r", 1) * J("q", 1) - R ** 2 * Q ** 2


def test_trig_rebase():
    a = parse_scalar("sin(beta*phi/3) * sin(beta*phi/2)", CTX)
    assert a.trig_bases() == {("phi", (("beta", 1),)): Fraction(1, 6)}
    node = parse_expression("sin(beta*phi/3) * sin(beta*phi/2)", CTX)
    rng = random.Random(11)
    for _ in range(10):
        pt = random_assignment([a], rng)
        assert eval_rational(a, pt) == evaluate(node, pt, CTX)


def test_negative_angle():
    assert parse_scalar("sin(-phi)", CTX) == -sin_of("phi")


@pytest.mark.parametrize("text,cls,col", [
    ("q + foo", UnknownSymbol, 5),
    ("sin(phi^2)", UnsupportedTrigArgument, 1),
    ("q + * r", ParseError, 5),
    ("q $ r", ParseError, 3),
    ("tan(q)", UnknownSymbol, 1),
])
def test_expression_errors(text, cls, col):
    with pytest.raises(cls) as exc:
        parse_scalar(text, CTX)
    assert exc.value.col == col


def test_division_by_field_rejected():
    with pytest.raises(ParseError):
        parse_scalar("1/q", CTX)


_atoms = st.sampled_from(["q", "r", "q_x", "r_t", "phi", "beta", "m", "i", "2", "3/4"])


def _expr_text():
    return st.recursive(_atoms, lambda sub: st.one_of(
        st.tuples(sub, st.sampled_from(["+", "-", "*"]), sub).map(lambda t: f"({t[0]} {t[1]} {t[2]})"),
        sub.map(lambda s: f"({s})^2"),
        st.sampled_from(["sin", "cos"]).map(lambda f: f"{f}(beta*phi/2)"),
        sub.map(lambda s: f"d({s}, x)"),
        sub.map(lambda s: f"({s})/m")), max_leaves=8)


@given(_expr_text(), st.integers(0, 2**32))
def test_ast_evaluator_agrees(text, seed):
    node = parse_expression(text, CTX)
    a = to_scalar(node, CTX)
    # names can cancel out of a; bind all of them anyway
    pt = random_assignment([a, J("q") * J("r") * J("phi") * parse_scalar("beta*m", CTX)], random.Random(seed))
    assert eval_rational(a, pt) == evaluate(node, pt, CTX)


# --- model files ---------------------------------------------------------------

@pytest.mark.parametrize("name", MODELS)
def test_round_trip(name):
    spec = load_model(name)
    assert parse_model(render(spec)) == spec


def test_bundled_paths():
    assert set(BUNDLED) == set(MODELS)
    for name in MODELS:
        assert bundled_path(name).exists()


BASE = """[model]
name = toy
fields = phi
parameters = m
basis = pauli
rmatrix = rational

[lagrangian]
density = {density}

[lax]
U.sigma3 = {u3}
"""


def test_lambda_in_lagrangian():
    with pytest.raises(ForbiddenSymbol) as exc:
        parse_model(BASE.format(density="phi_x^2 + lambda", u3="lambda"))
    assert exc.value.line == 9 and exc.value.col == 21


def test_error_positions_in_file():
    with pytest.raises(UnknownSymbol) as exc:
        parse_model(BASE.format(density="phi_x^2", u3="lambda*psi"))
    assert (exc.value.line, exc.value.col) == (12, 19)


def test_malformed_files():
    with pytest.raises(ParseError):
        parse_model("[model\nname = x\n")
    with pytest.raises(ParseError):
        parse_model(BASE.format(density="phi_x^2", u3="1").replace("basis = pauli", "basis = gl3"))
    with pytest.raises(ParseError):
        parse_model(BASE.format(density="phi_x^2", u3="1").replace("[lax]", "[lax]\nW.sigma1 = 2"))


def test_explicit_rmatrix_round_trip():
    text = BASE.format(density="phi_x^2", u3="lambda").replace("rmatrix = rational", "rmatrix = explicit")
    text += "\n[rmatrix]\nbasis = raising-lowering\nsigma3.sigma3 = 1/(2*(mu - lambda))\n"
    spec = parse_model(text)
    assert parse_model(render(spec)) == spec
    assert spec.r_matrix().tensor.get("sigma3", "sigma3") == parse_scalar("1/(2*(mu-lambda))",
                                                                          Context((), ("mu", "lambda")))


# --- pipeline ------------------------------------------------------------------

@pytest.fixture(scope="module")
def reports():
    return {name: run_pipeline(load_model(name), oracle_samples=5) for name in MODELS}


@pytest.mark.parametrize("name", MODELS)
def test_all_checks_pass(reports, name):
    rep = reports[name]
    assert [c.name for c in rep.checks] == list(CHECKS)
    assert all(c.status == "pass" for c in rep.checks), [(c.name, c.status, c.witness) for c in rep.checks]


def test_structured_schema(reports):
    d = json.loads(emit_report(reports["sine-gordon"], "json"))
    assert d["model"] == "sine-gordon"
    assert {"engine_version", "schema_version", "checks"} <= set(d)
    assert [c["status"] for c in d["checks"]] == ["pass"] * 8
    assert all(set(c) == {"name", "status", "witness", "millis"} for c in d["checks"])


def test_text_report(reports):
    text = emit_report(reports["nls"], "text").decode()
    assert text.startswith("model: nls")
    assert "[PASS   ] sklyanin" in text


def test_nls_with_wrong_r():
    spec = load_model("nls")
    spec.rmatrix = "trigonometric-sg"
    rep = run_pipeline(spec, only=["sklyanin", "cybe"], oracle_samples=3)
    status = {c.name: c for c in rep.checks}
    assert status["sklyanin"].status == "fail"
    assert status["sklyanin"].witness["differences"]
    assert status["cybe"].status == "pass"
    assert not rep.ok


def test_derive_only():
    rep = run_pipeline(load_model("nls"), only=["derive"], oracle_samples=3)
    d = {c.name: c for c in rep.checks}
    assert d["derive"].status == "pass"
    for key in ("euler_lagrange", "boundary_form", "omega", "hamiltonian"):
        assert key in d["derive"].witness
    assert all(c.status == "skipped" for c in rep.checks if c.name != "derive")


def test_isolation():
    full = {c.name: c.status for c in run_pipeline(load_model("mkdv"), oracle_samples=0).checks}
    for drop in CHECKS:
        part = run_pipeline(load_model("mkdv"), only=[c for c in CHECKS if c != drop], oracle_samples=0)
        for c in part.checks:
            if c.name != drop:
                assert c.status == full[c.name]


# --- CLI -----------------------------------------------------------------------

def test_cli_verify(capsys):
    assert main(["verify", "nls", "--check", "cybe", "--check", "derive"]) == 0
    out = capsys.readouterr().out
    assert "pass     cybe" in out and "skipped  sklyanin" in out


def test_cli_report_is_deterministic(capsys):
    outs = []
    for _ in range(2):
        assert main(["--oracle-samples", "3", "report", "mkdv", "--format", "structured"]) == 0
        outs.append(capsys.readouterr().out)
    assert outs[0] == outs[1]
    assert json.loads(outs[0])["model"] == "mkdv"


def test_cli_failure_exit(tmp_path, capsys):
    p = tmp_path / "bad.model"
    p.write_text(bundled_path("nls").read_text().replace("rmatrix = rational", "rmatrix = trigonometric-sg"))
    assert main(["verify", str(p), "--check", "sklyanin"]) == 1


def test_cli_usage_errors(tmp_path, capsys):
    with pytest.raises(SystemExit) as exc:
        main(["verify", "no-such-model"])
    assert exc.value.code == 2
    p = tmp_path / "broken.model"
    p.write_text("[model]\nname = x\nfields = q\n[lagrangian]\ndensity = q +\n[lax]\n")
    with pytest.raises(SystemExit) as exc:
        main(["verify", str(p)])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["bogus"])
    assert exc.value.code == 2


def test_cli_derive_and_list(capsys):
    assert main(["derive", "sine-gordon"]) == 0
    out = capsys.readouterr().out
    assert "omega^(1,1) = (-phi_t)·δphi∧dx + (-phi_x)·δphi∧dt" in out
    assert main(["list-models"]) == 0
    assert "mkdv" in capsys.readouterr().out
