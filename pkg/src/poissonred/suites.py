"""Named verification suites aggregating the checks of every module."""

from __future__ import annotations

import random
from fractions import Fraction
from math import factorial
from typing import Callable

from . import __version__
from .checks import (
    commuting_checks,
    darboux_checks,
    hamiltonian_condition_check,
    invariant_closure_check,
    jacobi_checks,
    k3_checks,
    matrices_bracket_check,
    operator_constant_check,
    reference_field_checks,
    pullback_check,
    q2_conjecture_probe,
    random_element,
    random_poly,
    reconstruction_checks,
    rho_identity_check,
    rule_soundness_check,
    tangency_checks,
    wedge_jacobi_checks,
)
from .convergence import (
    DEFAULT_K,
    DEFAULT_M,
    coeff_norm,
    homogeneous_part,
    radius_scan,
    random_homogeneous,
    truncate_entire,
    UV,
    uv_moyal_term,
)
from .derivations import darboux_verify
from .models import build_model
from .moyal import associativity_defect, bidifferential_coefficients, closed_form_crosscheck, moyal_term, star_truncated
from .report import Check, SuiteReport, check

SUITES = ("reduction", "darboux", "moyal", "matrices", "k3", "convergence", "all")
ACCEPTANCE_GRID = "s=0.05:0.2:4;t=0.025:0.1:4"


class UnknownSuiteError(KeyError):
    pass


# -- suites ---------------------------------------------------------------------------------


def reduction_suite(seed: int) -> list[Check]:
    out: list[Check] = []
    for n in (2, 3):
        out += pullback_check(n)
        out += hamiltonian_condition_check(n)
    for name in ("flat2", "flat3", "matrices"):
        out += invariant_closure_check(name)
    out += rho_identity_check()
    out += matrices_bracket_check()
    for name in ("flat2", "flat3", "cone"):
        out += jacobi_checks(build_model(name), seed)
    out += rule_soundness_check("cone")
    return out


def darboux_suite(seed: int) -> list[Check]:
    out: list[Check] = []
    for name in ("flat2", "cone", "matrices", "k3-II", "k3-III", "k3-IV"):
        model = build_model(name)
        out += darboux_checks(model)
        out += tangency_checks(model)
        out += commuting_checks(model, seed)
    for name in ("cone", "matrices"):
        model = build_model(name)
        out += reconstruction_checks(model)
        out += wedge_jacobi_checks(model)
    cone = build_model("cone")
    rep = darboux_verify(cone.structure, [(cone.element("s1"), cone.element("s2"))])
    seen = "; ".join(f"{r.label} = {r.value.to_text()}" for r in rep.failures())
    out.append(check("darboux.cone.non-pair", "cone", "(s1, s2) is rejected as a Darboux pair", not rep.passed,
                     "accepted as a pair", info=f"rejected: {seen}"))
    out += reference_field_checks()
    return out


def _pairs(model, rng: random.Random, count: int, degree: int = 3):
    return [(random_element(model, rng, degree), random_element(model, rng, degree)) for _ in range(count)]


def moyal_suite(seed: int) -> list[Check]:
    out: list[Check] = []
    for name, n_parity in (("cone", 50), ("matrices", 50), ("k3-II", 20)):
        model = build_model(name)
        sys = model.darboux
        rng = random.Random(f"moyal-{name}-{seed}")
        pairs = _pairs(model, rng, n_parity, 2 if name == "matrices" else 3)
        bad_q1 = [i for i, (f, g) in enumerate(pairs) if star_truncated(sys, 1, f, g)[1] != model.structure(f, g)]
        out.append(check(f"moyal.{name}.first-order", name, "c1 of the star product equals the bracket", not bad_q1,
                         f"cases {bad_q1}"))
        bad = []
        for i, (f, g) in enumerate(pairs):
            for k in range(6):
                d = model.algebra.normal_form(moyal_term(sys, k, f, g) - (-1) ** k * moyal_term(sys, k, g, f))
                if d:
                    bad.append(f"case {i}, k={k}: {d.to_text()}")
        out.append(check(f"moyal.{name}.parity", name, f"Q_k(f,g) = (-1)^k Q_k(g,f), k <= 5, {len(pairs)} pairs",
                         not bad, "\n".join(bad[:3])))
        one = model.ring.one()
        bad = []
        for i, (f, _) in enumerate(pairs[:10]):
            for left in (star_truncated(sys, 4, one, f), star_truncated(sys, 4, f, one)):
                if left[0] != f or any(c for c in left.coefficients[1:]):
                    bad.append(f"case {i}")
        out.append(check(f"moyal.{name}.unit", name, "1 * f = f * 1 = f through order 4", not bad, ", ".join(bad)))

    for name, K, trials in (("cone", 4, 20), ("matrices", 3, 10)):
        model = build_model(name)
        rng = random.Random(f"assoc-{name}-{seed}")
        bad = []
        for i in range(trials):
            deg = 3 if name == "cone" else 2
            f, g, h = (random_element(model, rng, deg) for _ in range(3))
            d = associativity_defect(model.darboux, K, f, g, h)
            if not d.is_zero():
                bad.append(f"case {i}: " + "; ".join(d.lines()))
        out.append(check(f"moyal.{name}.associativity", name, f"(f*g)*h = f*(g*h) through t^{K}, {trials} triples",
                         not bad, "\n".join(bad[:2])))

    cone = build_model("cone")
    rng = random.Random(f"closed-{seed}")
    bad = []
    for i, (f, g) in enumerate(_pairs(cone, rng, 10)):
        for k in range(6):
            if not closed_form_crosscheck(cone.darboux, k, f, g):
                bad.append(f"case {i}, k={k}")
    out.append(check("moyal.cone.closed-forms", "cone", "even/odd closed forms agree with Q_k, k <= 5", not bad,
                     ", ".join(bad[:5])))

    bad = []
    for k in range(1, 7):
        coeffs = bidifferential_coefficients(cone.darboux, k)
        worst = max((c.degree() for c in coeffs.values()), default=Fraction(-1))
        if worst > k:
            bad.append(f"k={k}: degree {worst}")
    out.append(check("moyal.cone.degree-bound", "cone", "Q_k has polynomial coefficients of degree <= k, k <= 6",
                     not bad, ", ".join(bad)))

    # polynomials in the Darboux pair: terms vanish beyond the total degree
    bad = []
    for name in ("cone", "matrices"):
        model = build_model(name)
        sys = model.darboux
        rng = random.Random(f"terminate-{name}-{seed}")
        gens = [p for pair in sys.pairs for p in pair]
        for i in range(5):
            m, n = rng.randint(0, 2), rng.randint(0, 2)
            f = model.algebra.normal_form(_pair_monomials(model, gens, m, rng))
            g = model.algebra.normal_form(_pair_monomials(model, gens, n, rng))
            for k in range(m + n + 1, min(m + n + 3, 8) + 1):
                if moyal_term(sys, k, f, g):
                    bad.append(f"{name} case {i}: Q_{k} nonzero for degrees ({m},{n})")
    out.append(check("moyal.termination", "cone/matrices", "Q_k vanishes for k > m + n on pair polynomials",
                     not bad, "\n".join(bad)))
    return out


def _pair_monomials(model, gens, degree: int, rng: random.Random):
    out = model.ring.zero()
    for _ in range(3):
        term = model.ring.one()
        for _ in range(degree):
            term = term * rng.choice(gens)
        out = out + (rng.randint(-3, 3) or 1) * term
    return out


def matrices_suite(seed: int) -> list[Check]:
    model = build_model("matrices")
    out = jacobi_checks(model, seed)
    out += rho_identity_check()
    out += matrices_bracket_check()
    out += invariant_closure_check(model)
    out += q2_conjecture_probe()
    out += rule_soundness_check("matrices")
    return out


def k3_suite(seed: int) -> list[Check]:
    out: list[Check] = []
    for v in ("II", "III", "IV"):
        out += jacobi_checks(build_model(f"k3-{v}"), seed)
        out += k3_checks(v)
        out += rule_soundness_check(f"k3-{v}")
    return out


def convergence_suite(seed: int) -> list[Check]:
    out = operator_constant_check()
    rep = radius_scan(1.0, ACCEPTANCE_GRID, DEFAULT_K, DEFAULT_M)
    fails = rep.in_ball_failures()
    out.append(check(
        "convergence.ball",
        "cone",
        f"all {len(rep.points)} grid points with |s| <= 0.2, |t| <= 0.1 converge with tail < 1e-6 (K={DEFAULT_K}, M={DEFAULT_M})",
        not fails and all(p.tail_bound < 1e-6 for p in rep.points),
        "\n".join(f"|s|={p.s_norm} t={p.t}: {p.verdict}, tail {p.tail_bound:.3e}" for p in fails),
        info=f"max tail {max(p.tail_bound for p in rep.points):.3e}; max ratio {max(p.ratio for p in rep.points):.4f}; "
        f"inequality-chain ratio at t=0.1: {max(p.chain_ratio for p in rep.points):.2f}",
    ))
    outside = radius_scan(1.0, "s=0.24,1,2;t=0.11,0.5,2", DEFAULT_K, DEFAULT_M)
    both = rep.points + outside.points
    rep.points = both
    viol = rep.monotone_violations()
    out.append(check("convergence.monotone", "cone", "no growing verdict inside a converged point's rectangle", not viol,
                     f"{len(viol)} violations"))
    bad = [p for p in both if p.ratio >= 1 and p.verdict == "converged"]
    out.append(check("convergence.no-false-certificate", "cone", "ratio >= 1 never yields converged", not bad, str(len(bad))))

    rng = random.Random(f"norms-{seed}")
    cone_ring = build_model("cone").ring
    names = ("s1", "s2", "s3")
    bad_sub, bad_mul = 0, 0
    for _ in range(100):
        p = random_poly(cone_ring, rng, names, 3, 4, 9)
        q = random_poly(cone_ring, rng, names, 3, 4, 9)
        if (p + q).coeff_sum() > p.coeff_sum() + q.coeff_sum():
            bad_sub += 1
        if (p * q).coeff_sum() > p.coeff_sum() * q.coeff_sum():
            bad_mul += 1
    out.append(check("convergence.norm.sub", "cone", "coefficient norm is subadditive and submultiplicative",
                     bad_sub == bad_mul == 0, f"{bad_sub} / {bad_mul} violations"))
    bad = []
    for m in range(1, 13):
        a = random_homogeneous(cone_ring, names, m, rng)
        for n in names:
            if a.partial(n).coeff_sum() > m * a.coeff_sum():
                bad.append(f"m={m}, d/d{n}")
    out.append(check("convergence.derivative-lemma", "cone", "||d_i a_m|| <= m ||a_m||, m <= 12", not bad, ", ".join(bad)))
    bad = []
    uv_names = ("u", "v")
    for m in range(0, 13):
        n = rng.randint(m, 12)
        a = random_homogeneous(UV, uv_names, 2 * m, rng)
        b = random_homogeneous(UV, uv_names, 2 * n, rng)
        for k in (2 * m + 1, 2 * m + 2):
            if uv_moyal_term(k, a, b):
                bad.append(f"m={m}, n={n}, k={k}")
    cone = build_model("cone")
    for m in range(0, 3):
        a = cone.algebra.normal_form(random_homogeneous(cone_ring, names, m, rng))
        b = cone.algebra.normal_form(random_homogeneous(cone_ring, names, m + 1, rng))
        for k in range(2 * m + 1, 9):
            if moyal_term(cone.darboux, k, a, b):
                bad.append(f"exact m={m}, k={k}")
    out.append(check("convergence.vanishing-lemma", "cone", "Q_k(a_m, b_n) = 0 for k/2 > min(m, n), m, n <= 12",
                     not bad, ", ".join(bad)))
    lam = (Fraction(1, 2), Fraction(1, 4), Fraction(1, 4))
    e = truncate_entire(lam, DEFAULT_M)
    eps = sum(abs(x) for x in lam)
    bad = []
    for m in range(DEFAULT_M + 1):
        if homogeneous_part(e, m).coeff_sum() > eps**m / factorial(m):
            bad.append(str(m))
    out.append(check("convergence.growth", "cone", "homogeneous parts of exp(<lam,s>) obey ||a_m|| <= eps^m/m!, m <= 24",
                     not bad, ", ".join(bad)))
    est = coeff_norm(cone.parse("4*s3 + 2*s1 + 2*s2"), seed=seed)
    out.append(check("convergence.sphere-norm", "cone", "sampled sphere maximum stays below the coefficient sum",
                     est.sample_max <= est.coeff_sum + 1e-9 and est.coeff_sum == 8, str(est)))
    return out


_RUNNERS: dict[str, Callable[[int], list[Check]]] = {
    "reduction": reduction_suite,
    "darboux": darboux_suite,
    "moyal": moyal_suite,
    "matrices": matrices_suite,
    "k3": k3_suite,
    "convergence": convergence_suite,
}


def run_suite(name: str, seed: int = 0) -> SuiteReport:
    if name not in SUITES:
        raise UnknownSuiteError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    names = [s for s in SUITES if s != "all"] if name == "all" else [name]
    rep = SuiteReport(name, seed, __version__)
    for n in names:
        rep.checks.extend(_RUNNERS[n](seed))
    return rep
