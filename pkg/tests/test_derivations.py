from __future__ import annotations

import random
from fractions import Fraction as F
from itertools import combinations

import pytest

from poissonred.checks import random_element
from poissonred.derivations import (
    DarbouxError,
    DarbouxSystem,
    Derivation,
    PoissonStructure,
    apply_derivation,
    bracket_eval,
    commutator_defect,
    darboux_verify,
    hamiltonian_field,
    jacobi_defect,
    reconstruct_bracket,
)
from poissonred.models import build_model, matrices_table

MODELS = ("flat2", "flat3", "cone", "matrices", "k3-II", "k3-III", "k3-IV")


@pytest.fixture(scope="module")
def cone():
    return build_model("cone")


@pytest.fixture(scope="module")
def mat():
    return build_model("matrices")


def test_apply_derivation_examples(cone, mat):
    A1 = mat.darboux.A[0]
    assert apply_derivation(A1, mat.ring["alpha1"]) == mat.ring["r"]
    assert apply_derivation(A1, mat.ring.one()).is_zero()
    A = cone.darboux.A[0]
    assert apply_derivation(A, cone.element("s3")) == cone.ring.gen("s2", F(1, 2))


def test_bracket_examples(cone, mat):
    r = cone.ring
    assert bracket_eval(cone.structure, r["s1"], r["s2"]) == cone.element("4*s3")
    f = cone.element("s1^2 + s3")
    assert bracket_eval(cone.structure, f, f).is_zero()
    m = mat.ring
    assert bracket_eval(mat.structure, m["alpha1"], m["gamma"]) == m["alpha1"]


def test_jacobi_examples(cone):
    r = cone.ring
    assert jacobi_defect(cone.structure, r["s1"], r["s2"], r["s3"]).is_zero()
    f, g = cone.element("s1*s2"), cone.element("s3 + s2^2")
    assert jacobi_defect(cone.structure, f, f, g).is_zero()


def test_hamiltonian_field_examples(cone, mat):
    A = hamiltonian_field(cone.structure, cone.element("sqrt(s2)"), "left")
    assert A.images == {"s1": 2 * cone.ring.gen("s1", F(1, 2)), "s2": cone.ring.zero(), "s3": cone.ring.gen("s2", F(1, 2))}
    assert hamiltonian_field(cone.structure, cone.ring.one()).is_zero()
    B2 = hamiltonian_field(mat.structure, mat.ring["alphat"] * mat.ring.gen("w", -1), "right")
    assert B2 == mat.darboux.B[1]
    with pytest.raises(ValueError):
        hamiltonian_field(cone.structure, cone.ring.one(), "middle")


def test_commutator_examples(cone, mat):
    A, B = cone.darboux.A[0], cone.darboux.B[0]
    assert commutator_defect(A, B, cone.element("s3")).is_zero()
    assert commutator_defect(A, A, cone.element("s1*s3")).is_zero()
    rng = random.Random(3)
    f = random_element(mat, rng)
    assert commutator_defect(mat.darboux.A[0], mat.darboux.B[1], f).is_zero()


def test_darboux_verify_examples(cone, mat):
    assert darboux_verify(cone.structure, cone.pairs).passed
    assert darboux_verify(mat.structure, mat.pairs).passed
    rep = darboux_verify(cone.structure, [(cone.element("s1"), cone.element("s2"))])
    assert not rep.passed
    [bad] = rep.failures()
    assert bad.value == cone.element("4*s3")
    with pytest.raises(DarbouxError):
        DarbouxSystem(cone.structure, [(cone.element("s1"), cone.element("s2"))])


def test_reconstruct_examples(cone, mat):
    rec = reconstruct_bracket(cone.darboux)
    r = cone.ring
    assert rec.entry("s1", "s2") == cone.element("4*s3")
    assert rec.entry("s1", "s3") == 2 * r["s1"]
    assert rec.entry("s2", "s3") == -2 * r["s2"]
    empty = DarbouxSystem(cone.structure.scaled(0), [])
    assert not reconstruct_bracket(empty).table
    independent = PoissonStructure(mat.algebra, matrices_table(mat.ring))
    assert reconstruct_bracket(mat.darboux).same_table(independent)


@pytest.mark.parametrize("name", MODELS)
def test_leibniz_and_biderivation(name):
    model = build_model(name)
    alg = model.algebra
    q = model.structure
    rng = random.Random(f"leibniz-{name}")
    fields = model.darboux.fields() if model.darboux else ()
    for _ in range(100):
        f, g, h = (random_element(model, rng, 2) for _ in range(3))
        # arbitrary derivations need not preserve the relation; hamiltonian ones do
        D = rng.choice(fields) if fields else hamiltonian_field(q, random_element(model, rng, 2))
        assert alg.normal_form(D(alg.mul(f, g)) - D(f) * g - f * D(g)).is_zero()
        assert alg.normal_form(q(alg.mul(f, g), h) - q(f, h) * g - f * q(g, h)).is_zero()
        assert alg.normal_form(q(f, g) + q(g, f)).is_zero()


@pytest.mark.parametrize("name", MODELS)
def test_jacobi_on_generators(name):
    model = build_model(name)
    ring = model.ring
    for u, v, w in combinations(model.algebra.coordinates, 3):
        assert jacobi_defect(model.structure, ring[u], ring[v], ring[w]).is_zero()


@pytest.mark.parametrize("name", ("cone", "matrices"))
def test_wedge_sum_is_poisson(name):
    model = build_model(name)
    rec = reconstruct_bracket(model.darboux)
    ring = model.ring
    for u, v, w in combinations(model.algebra.coordinates, 3):
        assert jacobi_defect(rec, ring[u], ring[v], ring[w]).is_zero()
    assert rec.same_table(model.structure)


@pytest.mark.parametrize("name", ("cone", "matrices", "k3-II", "k3-IV"))
def test_fields_tangent_and_commuting(name):
    model = build_model(name)
    assert all(v.is_zero() for v in model.tangency.values())
    rng = random.Random(f"commute-{name}")
    for _ in range(10):
        f = random_element(model, rng, 2)
        for D1, D2 in combinations(model.darboux.fields(), 2):
            assert commutator_defect(D1, D2, f).is_zero()


def test_derivation_rejects_unknown_coordinates(cone):
    with pytest.raises(Exception):
        Derivation(cone.algebra, {"zz": cone.ring.one()})
