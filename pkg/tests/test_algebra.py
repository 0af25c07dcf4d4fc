from __future__ import annotations

import random
from fractions import Fraction as F

import pytest

from poissonred.algebra import (
    AlgebraError,
    Generator,
    LatticeError,
    PresentedAlgebra,
    Ring,
    RewriteBudgetExceeded,
    make_rule,
    normal_form,
    partial,
    poly_equal,
    poly_mul,
    substitute,
)
from poissonred.checks import random_element, random_poly, rule_soundness_check
from poissonred.models import MODEL_NAMES, build_model, rho_poly

PRESENTED = ("cone", "matrices", "k3-II", "k3-III", "k3-IV")


@pytest.fixture(scope="module")
def cone():
    return build_model("cone")


@pytest.fixture(scope="module")
def mat():
    return build_model("matrices")


def test_mul_examples(cone):
    r = cone.ring
    half = r.gen("s1", F(1, 2))
    assert poly_mul(half, half) == r["s1"]
    assert poly_mul(r["s1"] + r["s3"], r.zero()).is_zero()
    assert poly_mul(r["s3"] + r["s1"], r["s3"] - r["s1"]) == r["s3"] ** 2 - r["s1"] ** 2


def test_normal_form_examples(cone, mat):
    r = cone.ring
    assert normal_form(r["s3"] ** 2, cone.algebra) == r["s1"] * r["s2"]
    assert normal_form(r.one(), cone.algebra) == r.one()
    m = mat.ring
    assert normal_form(m["w"] ** 5, mat.algebra) == m["alphat"] * m["betat"] * m["w"]


def test_poly_equal_examples(cone):
    r = cone.ring
    assert poly_equal(r["s3"] ** 2, r["s1"] * r["s2"], cone.algebra)
    p = r["s1"] + 3 * r["s2"]
    assert poly_equal(p, p, cone.algebra)
    assert not poly_equal(r["s3"], r["s1"] * r["s2"], cone.algebra)


def test_partial_examples(cone, mat):
    r = cone.ring
    assert partial(r.gen("s1", F(1, 2)), "s1") == F(1, 2) * r.gen("s1", -F(1, 2))
    assert partial(r["s1"], "s2").is_zero()
    m = mat.ring
    g, a1, b1 = m["gamma"], m["alpha1"], m["beta1"]
    assert partial(g**2 - a1 * b1 * g, "gamma") == 2 * g - a1 * b1


def test_substitute_examples():
    ring = Ring([Generator(n) for n in ("s1", "s2", "s3", "a1", "a2", "b1", "b2")])
    a1, a2, b1, b2 = (ring[n] for n in ("a1", "a2", "b1", "b2"))
    image = a1 * b1 + a2 * b2
    assert substitute(ring["s3"], {"s3": image}) == image
    p = 3 + ring["s1"] * ring["s2"] - 2 * ring["s1"]
    assert substitute(p, {"s1": ring.zero()}) == ring.const(3)


def test_rho_vanishes_on_diagonal(mat):
    five = rho_poly(mat.ring)
    ring = Ring([Generator(n) for n in ("a1", "a2", "b1", "b2")])
    a1, a2, b1, b2 = (ring[n] for n in ("a1", "a2", "b1", "b2"))
    bind = {"alpha1": a1 + a2, "alpha2": a1 * a2, "beta1": b1 + b2, "beta2": b1 * b2, "gamma": a1 * b1 + a2 * b2}
    assert substitute(five, bind, ring).is_zero()


def test_fractional_power_of_non_power_fails():
    ring = Ring([Generator("x"), Generator("y")])
    with pytest.raises(AlgebraError):
        substitute(ring.gen("x"), {"x": ring["x"] + ring["y"]}).power(F(1, 2))
    with pytest.raises(LatticeError):
        ring.gen("x", F(1, 2))


def test_serialization_is_graded_lex(cone):
    r = cone.ring
    p = r["s2"] + F(3, 4) * r.gen("s1", F(1, 2)) * r["s2"] - 2
    assert p.to_text() == "3/4*s1^{1/2}*s2 + s2 - 2"
    assert r.zero().to_text() == "0"


def test_budget_guard():
    ring = Ring([Generator("x"), Generator("y")])
    bad = PresentedAlgebra("loop", ring, (make_rule(ring["x"], ring["y"]), make_rule(ring["y"], ring["x"])))
    with pytest.raises(RewriteBudgetExceeded):
        bad.normal_form(ring["x"])


def test_rule_lhs_may_not_divide_rhs():
    ring = Ring([Generator("x")])
    with pytest.raises(AlgebraError):
        make_rule(ring["x"], ring["x"] ** 2)


@pytest.mark.parametrize("name", PRESENTED)
def test_ring_axioms(name):
    model = build_model(name)
    rng = random.Random(f"axioms-{name}")
    alg = model.algebra
    names = alg.coordinates
    for _ in range(200):
        p, q, r = (random_poly(model.ring, rng, names, 2, 3) for _ in range(3))
        assert (p * q) * r == p * (q * r)
        assert p * (q + r) == p * q + p * r
        assert p * q == q * p


@pytest.mark.parametrize("name", PRESENTED)
def test_normal_form_idempotent_and_compatible(name):
    model = build_model(name)
    alg = model.algebra
    rng = random.Random(f"nf-{name}")
    for _ in range(200):
        p = random_poly(model.ring, rng, alg.coordinates, 3, 3)
        q = random_poly(model.ring, rng, alg.coordinates, 3, 3)
        np_, nq = alg.normal_form(p), alg.normal_form(q)
        assert alg.normal_form(np_) == np_
        assert alg.normal_form(p * q) == alg.normal_form(np_ * nq)


def test_localized_rules_are_compatible(mat):
    """Products that cross the w^-4 alphat*betat cancellation stay consistent."""
    alg = mat.algebra
    rng = random.Random("localized")
    pool = [mat.ring.gen("w", e) for e in (-3, -1, 1, 3)] + [mat.ring[n] for n in ("alphat", "betat", "r")]
    for _ in range(200):
        p = sum((rng.randint(-2, 2) * rng.choice(pool) * rng.choice(pool) for _ in range(3)), mat.ring.zero())
        q = sum((rng.randint(-2, 2) * rng.choice(pool) for _ in range(3)), mat.ring.zero())
        assert alg.normal_form(p * q) == alg.normal_form(alg.normal_form(p) * alg.normal_form(q))


@pytest.mark.parametrize("name", PRESENTED)
def test_partials_commute(name):
    model = build_model(name)
    rng = random.Random(f"partials-{name}")
    names = model.ring.names
    for _ in range(50):
        p = random_element(model, rng)
        g, h = rng.choice(names), rng.choice(names)
        assert p.partial(g).partial(h) == p.partial(h).partial(g)


@pytest.mark.parametrize("name", PRESENTED)
def test_rewrite_soundness(name):
    [rec] = rule_soundness_check(name)
    assert rec.ok, rec.witness


def test_models_listed():
    assert set(PRESENTED) <= set(MODEL_NAMES)
