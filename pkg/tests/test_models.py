from __future__ import annotations

import pytest

from poissonred.algebra import AlgebraError
from poissonred.checks import (
    hamiltonian_condition_check,
    invariant_closure_check,
    k3_checks,
    matrices_bracket_check,
    operator_constant_check,
    reference_field_checks,
    pullback_check,
    q2_conjecture_probe,
    rho_identity_check,
)
from poissonred.models import build_model, canonical_name, rotation_field, flat_algebra, k3_bracket_from_f, k3_f


def _ok(records):
    bad = [r for r in records if not r.ok]
    assert not bad, "\n".join(f"{r.id}: {r.witness}" for r in bad)
    return {r.id: r for r in records}


def test_build_model_examples():
    cone = build_model("cone_reduced")
    r = cone.ring
    assert cone.structure.entry("s1", "s2") == cone.element("4*s3")
    assert cone.structure.entry("s1", "s3") == 2 * r["s1"]
    assert cone.structure.entry("s2", "s3") == -2 * r["s2"]
    flat = build_model("canonical_flat(2)")
    fr = flat.ring
    for i in (1, 2):
        for j in (1, 2):
            assert flat.structure.entry(f"x{i}", f"xi{j}") == fr.const(int(i == j))
            assert flat.structure.entry(f"x{i}", f"x{j}").is_zero()
            assert flat.structure.entry(f"xi{i}", f"xi{j}").is_zero()
    k3 = build_model("k3(III)")
    a, b = k3.pairs[0]
    assert a == k3.parse("1/2*x1*x0^-1*x3^(-1/2)")
    assert b == k3.parse("1/2*x2*x0^-1*x3^(-1/2)")


def test_aliases_and_unknown():
    assert canonical_name("flat(3)") == "flat3"
    assert canonical_name("matrices_reduced") == "matrices"
    with pytest.raises(KeyError):
        build_model("sphere")
    with pytest.raises(AlgebraError):
        build_model("k3(I)")


def test_k3_iii_darboux_relation_is_reported():
    rep = build_model("k3-III").darboux_report
    assert not rep.passed
    assert [r.value.to_text() for r in rep.failures()] == ["0"]


def test_pullback():
    for n in (2, 3):
        recs = _ok(pullback_check(n))
    assert "reduction.pullback.n3.q(s2,s3)" in recs
    with pytest.raises(ValueError):
        pullback_check(1)


def test_hamiltonian_condition():
    for n in (2, 3):
        recs = _ok(hamiltonian_condition_check(n))
    assert "x-part sign" in recs["reduction.hamiltonian.n3.e12"].witness
    alg = flat_algebra(2)
    field = rotation_field(alg, 2, 1, 2)
    assert field(alg.ring["x1"]) == alg.ring["x2"]
    with pytest.raises(ValueError):
        rotation_field(alg, 2, 1, 1)


@pytest.mark.parametrize("name", ("flat2", "flat3", "matrices"))
def test_invariant_closure(name):
    _ok(invariant_closure_check(name))


def test_rho_identity():
    recs = _ok(rho_identity_check())
    assert "differ by" in recs["reduction.rho.two-forms"].witness


def test_matrices_bracket():
    recs = _ok(matrices_bracket_check())
    assert len(recs) == 10


@pytest.mark.parametrize("variant", ("II", "III", "IV"))
def test_k3_bracket(variant):
    recs = _ok(k3_checks(variant))
    q = k3_bracket_from_f(variant)
    f = k3_f(q.algebra.ring, variant)
    for c in ("x1", "x2", "x3"):
        assert q(q.algebra.ring[c], f).is_zero()
    if variant == "IV":
        assert q.entry("x1", "x2") == 4 * q.algebra.ring["x3"] ** 3
    if variant == "III":
        assert "opposite sign" in recs["k3.III.reference-table"].witness


def test_k3_ii_pair():
    m = build_model("k3-II")
    a, b = m.pairs[0]
    assert m.structure(a, b) == m.ring.one()


def test_reference_fields():
    recs = _ok(reference_field_checks())
    assert recs["fields.matrices.A1"].witness == ""
    assert "gamma" in recs["fields.matrices.A2"].witness
    assert recs["fields.k3-II.A"].witness == ""


def test_q2_probe():
    recs = _ok(q2_conjecture_probe())
    assert recs["conjecture.Q2.bidegree"].witness == "orders (2,2)"
    assert recs["conjecture.Q2.denominator"].witness.startswith("exponent 1")


def test_operator_constant():
    recs = _ok(operator_constant_check())
    assert "(all orders 10)" in recs["operators.max"].witness


def test_opposite_branch_builds():
    m = build_model("matrices-")
    assert m.darboux_report is not None
