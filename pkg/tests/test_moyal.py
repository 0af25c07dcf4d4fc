from __future__ import annotations

import random
from itertools import product
from math import comb, factorial

import pytest

from poissonred.checks import random_element, random_poly
from poissonred.convergence import cone_to_uv, uv_moyal_term
from poissonred.models import build_model
from poissonred.moyal import (
    MAX_ORDER,
    ResourceLimitError,
    apply_bidifferential,
    associativity_defect,
    bidifferential_coefficients,
    closed_form_crosscheck,
    moyal_term,
    star_truncated,
)


@pytest.fixture(scope="module")
def cone():
    return build_model("cone")


@pytest.fixture(scope="module")
def mat():
    return build_model("matrices")


def index_string_sum(sys, k, f, g):
    """Literal nested sum over index strings, A/B blocks split at position j."""
    alg = sys.algebra
    out = alg.ring.zero()
    for j in range(k + 1):
        for idx in product(range(sys.n), repeat=k):
            left, right = f, g
            for pos, i in enumerate(idx):
                if pos < j:
                    left, right = sys.A[i](left), sys.B[i](right)
                else:
                    left, right = sys.B[i](left), sys.A[i](right)
            out = out + (-1) ** j * comb(k, j) * left * right
    return alg.normal_form(out)


def test_examples(cone):
    S = cone.darboux
    f, g = cone.element("s1^2 + s3"), cone.element("s2*s3")
    assert moyal_term(S, 1, f, g) == cone.structure(f, g)
    a, b = cone.element("sqrt(s1)"), cone.element("sqrt(s2)")
    assert moyal_term(S, 2, a, b).is_zero()
    assert moyal_term(S, 0, f, g) == cone.algebra.mul(f, g)


def test_star_examples(cone):
    S = cone.darboux
    g = cone.element("s1*s2 + s3")
    st = star_truncated(S, 4, cone.ring.one(), g)
    assert st[0] == g and all(c.is_zero() for c in st.coefficients[1:])
    a, b = cone.element("sqrt(s1)"), cone.element("sqrt(s2)")
    diff = star_truncated(S, 4, a, b) - star_truncated(S, 4, b, a)
    assert diff[1] == 2 * cone.ring.one()
    assert all(diff[k].is_zero() for k in (0, 2, 3, 4))
    # homogeneous in the lattice: terms vanish past twice the smaller degree
    f, h = cone.element("s1^(1/2)*s2"), cone.element("s3")
    st = star_truncated(S, 5, f, h)
    assert all(st[k].is_zero() for k in range(3, 6))


def test_associativity_examples(cone, mat):
    S = cone.darboux
    f = cone.element("s1 + s2^2")
    assert associativity_defect(S, 3, cone.ring.one(), f, cone.element("s3")).is_zero()
    a, b = cone.element("sqrt(s1)"), cone.element("sqrt(s2)")
    assert associativity_defect(S, 4, a, b, a).is_zero()
    rng = random.Random(11)
    f, g, h = (random_element(mat, rng, 2) for _ in range(3))
    assert associativity_defect(mat.darboux, 3, f, g, h).is_zero()


def test_closed_forms(cone):
    rng = random.Random(5)
    for _ in range(5):
        f, g = random_element(cone, rng), random_element(cone, rng)
        for k in range(6):
            assert closed_form_crosscheck(cone.darboux, k, f, g)


def test_closed_forms_need_one_pair(mat):
    with pytest.raises(ValueError):
        closed_form_crosscheck(mat.darboux, 2, mat.ring["alpha1"], mat.ring["beta1"])


@pytest.mark.parametrize("name", ("cone", "matrices"))
def test_index_string_sum_is_sign_flipped(name):
    """The index-string sum is (-1)^k times Q_k (it starts from -q at k=1)."""
    model = build_model(name)
    rng = random.Random(f"index-{name}")
    for _ in range(3):
        f, g = random_element(model, rng, 2), random_element(model, rng, 2)
        for k in range(4):
            assert index_string_sum(model.darboux, k, f, g) == (-1) ** k * moyal_term(model.darboux, k, f, g)


@pytest.mark.parametrize("name", ("cone", "matrices", "k3-II", "k3-IV"))
def test_parity_and_first_order(name):
    model = build_model(name)
    S = model.darboux
    rng = random.Random(f"parity-{name}")
    for _ in range(15):
        f, g = random_element(model, rng, 2), random_element(model, rng, 2)
        assert star_truncated(S, 1, f, g)[1] == model.structure(f, g)
        for k in range(6):
            assert model.algebra.normal_form(moyal_term(S, k, f, g) - (-1) ** k * moyal_term(S, k, g, f)).is_zero()


def test_cone_associativity_k4(cone):
    rng = random.Random(2024)
    for _ in range(20):
        f, g, h = (random_element(cone, rng, 3) for _ in range(3))
        assert associativity_defect(cone.darboux, 4, f, g, h).is_zero()


def test_bidifferential_form_matches(cone, mat):
    for model in (cone, mat):
        # the operator form acts on representatives written in the coordinates
        rng = random.Random(f"bidiff-{model.name}")
        coords = model.algebra.coordinates
        f, g = (random_poly(model.ring, rng, coords, 2, 4, 5) for _ in range(2))
        for k in (1, 2, 3):
            coeffs = bidifferential_coefficients(model.darboux, k)
            assert apply_bidifferential(model.darboux, coeffs, f, g) == moyal_term(model.darboux, k, f, g)


def test_degree_bound(cone):
    for k in range(1, 7):
        coeffs = bidifferential_coefficients(cone.darboux, k)
        assert max(c.degree() for c in coeffs.values()) <= k


def test_chart_terms_match_flat_moyal(cone):
    rng = random.Random(8)
    for _ in range(5):
        f, g = random_element(cone, rng), random_element(cone, rng)
        for k in range(5):
            assert cone_to_uv(moyal_term(cone.darboux, k, f, g)) == uv_moyal_term(k, cone_to_uv(f), cone_to_uv(g))


def test_termination_on_pair_polynomials(mat):
    S = mat.darboux
    (a1, b1), (a2, b2) = S.pairs
    f = mat.algebra.normal_form(a1 * a2 + b2)
    g = mat.algebra.normal_form(b1 * b2 * a2)
    assert not moyal_term(S, 2, f, g).is_zero()
    for k in range(3, MAX_ORDER + 1):
        assert moyal_term(S, k, f, g).is_zero()


def test_resource_guard(cone):
    f = cone.element("s1")
    with pytest.raises(ResourceLimitError):
        moyal_term(cone.darboux, MAX_ORDER + 1, f, f)
    with pytest.raises(ValueError):
        moyal_term(cone.darboux, -1, f, f)
    assert moyal_term(cone.darboux, 9, f, f, max_order=9).is_zero()


def test_coefficients_are_divided(cone):
    f, g = cone.element("s1^2"), cone.element("s2^2")
    st = star_truncated(cone.darboux, 4, f, g)
    for k in range(5):
        assert st[k] * factorial(k) == moyal_term(cone.darboux, k, f, g)
