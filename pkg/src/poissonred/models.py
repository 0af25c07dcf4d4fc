"""Catalog of the Poisson spaces: flat phase space, the reduced cone, commuting
2x2 matrices and three singular quartic (K3) charts."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations

from .algebra import AlgebraError, Generator, Poly, PresentedAlgebra, Ring, make_rule
from .derivations import (
    DarbouxError,
    DarbouxReport,
    DarbouxSystem,
    Derivation,
    PoissonStructure,
    darboux_verify,
)

F = Fraction

K3_VARIANTS = ("II", "III", "IV")

# Overall constant of the chart bracket relative to the Jacobian determinant.
K3_NORMALIZATION = {"II": F(1), "III": F(1), "IV": F(1, 2)}


@dataclass(frozen=True)
class MomentumData:
    """Constraint components on the unreduced space, their action fields and
    the invariant generators expressed on that space."""

    structure: PoissonStructure
    components: dict[str, Poly]
    action_fields: dict[str, Derivation]
    invariants: dict[str, Poly]


@dataclass
class ModelDescriptor:
    name: str
    algebra: PresentedAlgebra
    structure: PoissonStructure
    pairs: tuple[tuple[Poly, Poly], ...] = ()
    darboux: DarbouxSystem | None = None
    darboux_report: DarbouxReport | None = None
    relation: Poly | None = None
    momentum: MomentumData | None = None
    notes: tuple[str, ...] = ()
    tangency: dict[str, Poly] = field(default_factory=dict)

    @property
    def ring(self) -> Ring:
        return self.algebra.ring

    def parse(self, text: str) -> Poly:
        from .expr import parse_expr

        return parse_expr(text, self.algebra)

    def element(self, text: str) -> Poly:
        return self.algebra.normal_form(self.parse(text))


def _finish(model: ModelDescriptor) -> ModelDescriptor:
    """Verify the Darboux pairs and the tangency of their fields to the relation."""
    if model.pairs:
        model.darboux_report = darboux_verify(model.structure, model.pairs)
        if model.darboux_report.passed:
            model.darboux = DarbouxSystem(model.structure, model.pairs)
    if model.darboux is not None and model.relation is not None:
        for k, (A, B) in enumerate(zip(model.darboux.A, model.darboux.B), start=1):
            model.tangency[f"A{k}"] = A(model.relation)
            model.tangency[f"B{k}"] = B(model.relation)
    return model


# -- flat phase space ---------------------------------------------------------


def flat_names(n: int) -> tuple[list[str], list[str]]:
    return [f"x{i}" for i in range(1, n + 1)], [f"xi{i}" for i in range(1, n + 1)]


def flat_algebra(n: int) -> PresentedAlgebra:
    xs, xis = flat_names(n)
    ring = Ring([Generator(x) for x in xs] + [Generator(p) for p in xis])
    return PresentedAlgebra(f"flat{n}", ring, measure="no rules")


def flat_structure(alg: PresentedAlgebra, n: int) -> PoissonStructure:
    xs, xis = flat_names(n)
    one = alg.ring.one()
    return PoissonStructure(alg, {(x, p): one for x, p in zip(xs, xis)}, name=alg.name)


def flat_invariants(ring: Ring, n: int) -> dict[str, Poly]:
    xs, xis = flat_names(n)
    return {
        "s1": sum((ring[x] ** 2 for x in xs), ring.zero()),
        "s2": sum((ring[p] ** 2 for p in xis), ring.zero()),
        "s3": sum((ring[x] * ring[p] for x, p in zip(xs, xis)), ring.zero()),
    }


def rotation_field(alg: PresentedAlgebra, n: int, j: int, k: int) -> Derivation:
    """Diagonal rotation field for e_jk; the momentum-space part
    ``xi_k d/dxi_j - xi_j d/dxi_k`` fixes the sign."""
    if j == k:
        raise ValueError("e_jk needs j != k")
    ring = alg.ring
    return Derivation(
        alg,
        {
            f"xi{j}": ring[f"xi{k}"],
            f"xi{k}": -ring[f"xi{j}"],
            f"x{j}": ring[f"x{k}"],
            f"x{k}": -ring[f"x{j}"],
        },
    )


def flat_momentum(n: int) -> MomentumData:
    alg = flat_algebra(n)
    ring = alg.ring
    q = flat_structure(alg, n)
    comps, fields = {}, {}
    for j, k in combinations(range(1, n + 1), 2):
        key = f"e{j}{k}"
        comps[key] = ring[f"x{j}"] * ring[f"xi{k}"] - ring[f"x{k}"] * ring[f"xi{j}"]
        fields[key] = rotation_field(alg, n, j, k)
    return MomentumData(q, comps, fields, flat_invariants(ring, n))


def build_flat(n: int) -> ModelDescriptor:
    if n < 1:
        raise ValueError("flat model needs n >= 1")
    alg = flat_algebra(n)
    xs, xis = flat_names(n)
    pairs = tuple((alg[x], alg[p]) for x, p in zip(xs, xis))
    mom = flat_momentum(n) if n >= 2 else None
    return _finish(
        ModelDescriptor(
            name=f"flat{n}",
            algebra=alg,
            structure=flat_structure(alg, n),
            pairs=pairs,
            momentum=mom,
            notes=("canonical bracket sum_i dx^i ^ dxi_i; momentum x^j xi_k - x^k xi_j",),
        )
    )


# -- reduced cone -------------------------------------------------------------


def cone_algebra() -> PresentedAlgebra:
    ring = Ring([Generator("s1", 2, True), Generator("s2", 2, True), Generator("s3")])
    rule = make_rule(ring["s3"], ring.monomial(1, s1=F(1, 2), s2=F(1, 2)), note="s3 = sqrt(s1)*sqrt(s2)")
    return PresentedAlgebra(
        "cone",
        ring,
        (rule,),
        measure="exponent of s3 drops by one per step",
    )


def cone_table(ring: Ring) -> dict[tuple[str, str], Poly]:
    return {
        ("s1", "s2"): 4 * ring["s3"],
        ("s1", "s3"): 2 * ring["s1"],
        ("s2", "s3"): -2 * ring["s2"],
    }


def build_cone(n_ambient: int = 3) -> ModelDescriptor:
    alg = cone_algebra()
    ring = alg.ring
    return _finish(
        ModelDescriptor(
            name="cone",
            algebra=alg,
            structure=PoissonStructure(alg, cone_table(ring), name="cone"),
            pairs=((ring.gen("s1", F(1, 2)), ring.gen("s2", F(1, 2))),),
            relation=ring["s3"] ** 2 - ring["s1"] * ring["s2"],
            momentum=flat_momentum(n_ambient),
            notes=(
                "invariants s1=|x|^2, s2=|xi|^2, s3=<x,xi> of O(n) on R^n x R^n",
                "quadratic extension by sqrt(s1), sqrt(s2) with branch s3 = sqrt(s1)sqrt(s2)",
            ),
        )
    )


# -- commuting matrices -------------------------------------------------------

MATRIX_COORDS = ("alpha1", "alpha2", "beta1", "beta2", "gamma")


def matrices_algebra(branch: int = 1) -> PresentedAlgebra:
    """Invariants of Sl(2) on pairs of 2x2 matrices, localized at pi^{1/4} = w.

    alphat = alpha2 - alpha1^2/4 and betat = beta2 - beta1^2/4 replace alpha2,
    beta2; gamma = alpha1*beta1/2 + 2*branch*w^2 and w^4 = alphat*betat;
    r is sqrt(2).
    """
    if branch not in (1, -1):
        raise ValueError("branch must be +1 or -1")
    gens = [Generator(n) for n in MATRIX_COORDS] + [
        Generator("alphat"),
        Generator("betat"),
        Generator("w", 1, True),
        Generator("r", 1, True),
    ]
    ring = Ring(gens)
    a1, b1, at, bt, w, r = (ring[n] for n in ("alpha1", "beta1", "alphat", "betat", "w", "r"))
    q = F(1, 4)
    rules = (
        make_rule(ring["alpha2"], at + q * a1**2),
        make_rule(ring["beta2"], bt + q * b1**2),
        make_rule(ring["gamma"], F(1, 2) * a1 * b1 + 2 * branch * w**2),
        make_rule(at * bt, w**4, when_negative="w", note="w^-4 * alphat*betat = 1"),
        make_rule(w**4, at * bt),
        make_rule(ring.one(), F(1, 2) * r**2, when_negative="r", note="1/r = r/2"),
        make_rule(r**2, ring.const(2)),
    )
    w_inv3 = ring.gen("w", -3)
    differentials = {
        "alphat": {"alpha2": ring.one(), "alpha1": -F(1, 2) * a1},
        "betat": {"beta2": ring.one(), "beta1": -F(1, 2) * b1},
        "w": {"alphat": F(1, 4) * w_inv3 * bt, "betat": F(1, 4) * w_inv3 * at},
        "r": {},
    }
    return PresentedAlgebra(
        "matrices" if branch == 1 else "matrices-",
        ring,
        rules,
        coordinates=MATRIX_COORDS,
        differentials=differentials,
        measure="alpha2, beta2, gamma eliminated; w exponent pushed into [0,4) or alphat*betat removed; r exponent into {0,1}",
    )


def matrices_table(ring: Ring) -> dict[tuple[str, str], Poly]:
    g = ring.gen
    return {
        ("alpha1", "beta1"): ring.const(2),
        ("alpha1", "beta2"): g("beta1"),
        ("alpha2", "beta1"): g("alpha1"),
        ("alpha2", "beta2"): g("gamma"),
        ("alpha1", "gamma"): g("alpha1"),
        ("beta1", "gamma"): -g("beta1"),
        ("alpha2", "gamma"): 2 * g("alpha2"),
        ("beta2", "gamma"): -2 * g("beta2"),
    }


def rho_poly(ring: Ring) -> Poly:
    a1, a2, b1, b2, c = (ring[n] for n in MATRIX_COORDS)
    return c**2 - a1 * b1 * c + a2 * (b1**2 - 2 * b2) + b2 * (a1**2 - 2 * a2)


MATRIX_ENTRIES = ("a1", "a2", "a3", "a4", "b1", "b2", "b3", "b4")
# A = [[a1, a3], [a4, a2]], B = [[b1, b3], [b4, b2]]; the invariant pairing tr(dA ^ dB)
TRACE_PAIRING = (("a1", "b1"), ("a2", "b2"), ("a3", "b4"), ("a4", "b3"))
LITERAL_PAIRING = (("a1", "b1"), ("a2", "b2"), ("a3", "b3"), ("a4", "b4"))


def matrix_space(pairing=TRACE_PAIRING) -> PoissonStructure:
    ring = Ring([Generator(n) for n in MATRIX_ENTRIES])
    alg = PresentedAlgebra("M2xM2", ring)
    return PoissonStructure(alg, {p: ring.one() for p in pairing}, name="M2xM2")


def _mat(ring: Ring, p: str) -> list[list[Poly]]:
    return [[ring[f"{p}1"], ring[f"{p}3"]], [ring[f"{p}4"], ring[f"{p}2"]]]


def _matmul(X, Y):
    return [[X[i][0] * Y[0][j] + X[i][1] * Y[1][j] for j in range(2)] for i in range(2)]


def matrix_invariants(ring: Ring) -> dict[str, Poly]:
    A, B = _mat(ring, "a"), _mat(ring, "b")
    AB = _matmul(A, B)
    return {
        "alpha1": A[0][0] + A[1][1],
        "alpha2": A[0][0] * A[1][1] - A[0][1] * A[1][0],
        "beta1": B[0][0] + B[1][1],
        "beta2": B[0][0] * B[1][1] - B[0][1] * B[1][0],
        "gamma": AB[0][0] + AB[1][1],
    }


def matrices_momentum() -> MomentumData:
    q = matrix_space()
    alg = q.algebra
    ring = alg.ring
    A, B = _mat(ring, "a"), _mat(ring, "b")
    AB, BA = _matmul(A, B), _matmul(B, A)
    J = [[AB[i][j] - BA[i][j] for j in range(2)] for i in range(2)]
    zero, one = ring.zero(), ring.one()
    # v ranges over E21, -E12, H; <v,J> = tr(vJ).  The first two are the
    # constraint polynomials of the cone Y.
    basis = {
        "E21": [[zero, zero], [one, zero]],
        "-E12": [[zero, -one], [zero, zero]],
        "H": [[one, zero], [zero, -one]],
    }
    comps, fields = {}, {}
    for key, v in basis.items():
        vJ = _matmul(v, J)
        comps[key] = vJ[0][0] + vJ[1][1]
        images = {}
        for name, X in (("a", A), ("b", B)):
            # infinitesimal conjugation X -> [X, v]
            Xv, vX = _matmul(X, v), _matmul(v, X)
            for (i, j), idx in (((0, 0), 1), ((1, 1), 2), ((0, 1), 3), ((1, 0), 4)):
                images[f"{name}{idx}"] = Xv[i][j] - vX[i][j]
        fields[key] = Derivation(alg, images)
    return MomentumData(q, comps, fields, matrix_invariants(ring))


def build_matrices(branch: int = 1) -> ModelDescriptor:
    alg = matrices_algebra(branch)
    ring = alg.ring
    r, w_inv = ring["r"], ring.gen("w", -1)
    pairs = (
        (F(1, 2) * r * ring["alpha1"], F(1, 2) * r * ring["beta1"]),
        (ring["alphat"] * w_inv, ring["betat"] * w_inv),
    )
    return _finish(
        ModelDescriptor(
            name="matrices" if branch == 1 else "matrices-",
            algebra=alg,
            structure=PoissonStructure(alg, matrices_table(ring), name="matrices"),
            pairs=pairs,
            relation=rho_poly(ring),
            momentum=matrices_momentum(),
            notes=(
                "Sl(2,C) acting diagonally by conjugation on M2 x M2",
                "alphat = alpha2 - alpha1^2/4, betat = beta2 - beta1^2/4, pi = alphat*betat, w = pi^{1/4}",
                "branch gamma - alpha1*beta1/2 = +2 w^2" if branch == 1 else "opposite branch (untested)",
            ),
        )
    )


# -- K3 charts ----------------------------------------------------------------


def k3_ring() -> Ring:
    return Ring(
        [Generator("x0", 2, True), Generator("x1"), Generator("x2"), Generator("x3", 2, True)]
    )


def k3_f(ring: Ring, variant: str) -> Poly:
    x0, x1, x2, x3 = (ring[f"x{i}"] for i in range(4))
    if variant == "II":
        return x0 * x3**3 - x1**2 * x2**2
    if variant == "III":
        return x0**2 * x3**2 - x1**2 * x2**2
    if variant == "IV":
        return x3**4 - x1**2 * x2**2
    raise ValueError(f"unknown K3 variant {variant!r}; expected one of {K3_VARIANTS}")


def k3_algebra(variant: str) -> PresentedAlgebra:
    ring = k3_ring()
    f = k3_f(ring, variant)
    lead = ring["x1"] ** 2 * ring["x2"] ** 2
    rule = make_rule(lead, f + lead, note="f = 0 solved for x1^2*x2^2")
    return PresentedAlgebra(f"k3-{variant}", ring, (rule,), measure="min(deg x1, deg x2) drops")


def determinant_bracket(alg: PresentedAlgebra, f: Poly) -> PoissonStructure:
    """Chart bracket det(da; db; df) in the variables x1, x2, x3."""
    grads = {c: f.partial(c) for c in ("x1", "x2", "x3")}
    return PoissonStructure(
        alg,
        {("x1", "x2"): grads["x3"], ("x2", "x3"): grads["x1"], ("x1", "x3"): -grads["x2"]},
        name=alg.name,
    )


def k3_bracket_from_f(variant: str, alg: PresentedAlgebra | None = None) -> PoissonStructure:
    alg = alg or k3_algebra(variant)
    return determinant_bracket(alg, k3_f(alg.ring, variant))


def k3_reference_table(ring: Ring, variant: str) -> dict[tuple[str, str], Poly] | None:
    """Reference chart brackets for variants II and III (none recorded for IV)."""
    x0, x1, x2, x3 = (ring[f"x{i}"] for i in range(4))
    if variant == "II":
        return {
            ("x1", "x2"): 3 * x0 * x3**2,
            ("x2", "x3"): -2 * x1 * x2**2,
            ("x3", "x1"): -2 * x1**2 * x2,
        }
    if variant == "III":
        return {
            ("x1", "x2"): 2 * x0**2 * x3,
            ("x2", "x3"): 2 * x1 * x2**2,
            ("x3", "x1"): 2 * x1**2 * x2,
        }
    return None


def k3_pairs(ring: Ring, variant: str) -> tuple[tuple[Poly, Poly], ...]:
    m = ring.monomial
    half = F(1, 2)
    if variant == "II":
        return ((m(1, x2=1, x3=-1, x0=-half), m(1, x1=1, x3=-1, x0=-half)),)
    if variant == "III":
        return ((m(half, x1=1, x0=-1, x3=-half), m(half, x2=1, x0=-1, x3=-half)),)
    if variant == "IV":
        return ((m(1, x1=1, x3=-F(3, 2)), m(-1, x2=1, x3=-F(3, 2))),)
    raise ValueError(variant)


def build_k3(variant: str) -> ModelDescriptor:
    alg = k3_algebra(variant)
    q = k3_bracket_from_f(variant, alg).scaled(K3_NORMALIZATION[variant])
    return _finish(
        ModelDescriptor(
            name=f"k3-{variant}",
            algebra=alg,
            structure=q,
            pairs=k3_pairs(alg.ring, variant),
            relation=k3_f(alg.ring, variant),
            notes=(
                "chart x0 != 0; x0 is a Casimir",
                f"bracket = {K3_NORMALIZATION[variant]} * det(da; db; df)",
            ),
        )
    )


# -- catalog ------------------------------------------------------------------

MODEL_NAMES = ("flat2", "flat3", "cone", "matrices", "k3-II", "k3-III", "k3-IV")

_ALIASES = {
    "cone_reduced": "cone",
    "matrices_reduced": "matrices",
}


def canonical_name(name: str) -> str:
    name = name.strip()
    name = _ALIASES.get(name, name)
    m = re.fullmatch(r"(?:canonical_)?flat\(?(\d+)\)?", name)
    if m:
        return f"flat{int(m.group(1))}"
    m = re.fullmatch(r"k3[-(_]?(I{1,3}|IV)\)?", name)
    if m:
        return f"k3-{m.group(1)}"
    return name


@lru_cache(maxsize=None)
def build_model(name: str) -> ModelDescriptor:
    key = canonical_name(name)
    if key.startswith("flat"):
        return build_flat(int(key[4:]))
    if key == "cone":
        return build_cone()
    if key == "matrices":
        return build_matrices(1)
    if key == "matrices-":
        return build_matrices(-1)
    if key.startswith("k3-"):
        variant = key[3:]
        if variant == "I":
            raise AlgebraError("K3 example I needs a transcendental function and is not representable")
        if variant in K3_VARIANTS:
            return build_k3(variant)
    raise KeyError(f"unknown model {name!r}; known: {', '.join(MODEL_NAMES)}")
