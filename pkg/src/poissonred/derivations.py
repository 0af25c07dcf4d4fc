"""Derivations, Poisson structures, Darboux systems and differential operators."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .algebra import AlgebraError, Poly, PresentedAlgebra


class Derivation:
    """A derivation of a presented algebra, fixed by its values on the coordinates.

    Values on derived generators (radicals, adjoined quotients) follow from the
    algebra's ``differentials`` by the chain rule.
    """

    def __init__(self, algebra: PresentedAlgebra, images: Mapping[str, Poly]):
        self.algebra = algebra
        ring = algebra.ring
        unknown = set(images) - set(algebra.coordinates)
        if unknown:
            raise AlgebraError(f"derivation images given for non-coordinates {sorted(unknown)}")
        self.images = {
            c: algebra.normal_form(images[c]) if c in images else ring.zero()
            for c in algebra.coordinates
        }
        self._gen_images = tuple(self._image_of(n, ()) for n in ring.names)

    def _image_of(self, name: str, stack: tuple[str, ...]) -> Poly:
        if name in self.images:
            return self.images[name]
        if name in stack:
            raise AlgebraError(f"cyclic differential through {name}")
        diff = self.algebra.differentials.get(name)
        ring = self.algebra.ring
        if diff is None:
            return ring.zero()
        out = ring.zero()
        for h, coeff in diff.items():
            img = self._image_of(h, stack + (name,))
            if img:
                out = out + coeff * img
        return self.algebra.normal_form(out)

    def image(self, name: str) -> Poly:
        return self._gen_images[self.algebra.ring.index[name]]

    def raw(self, f: Poly) -> Poly:
        """Chain-rule value before normalization."""
        out = f.ring.zero()
        for name, img in zip(f.ring.names, self._gen_images):
            if img:
                d = f.partial(name)
                if d:
                    out = out + d * img
        return out

    def __call__(self, f: Poly) -> Poly:
        return self.algebra.normal_form(self.raw(f))

    def is_zero(self) -> bool:
        return all(v.is_zero() for v in self.images.values())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Derivation):
            return NotImplemented
        return self.algebra is other.algebra and self.images == other.images

    def __repr__(self) -> str:
        body = " + ".join(f"({v})*d/d{c}" for c, v in self.images.items() if v)
        return f"Derivation({body or '0'})"


def apply_derivation(D: Derivation, f: Poly) -> Poly:
    return D(f)


def coordinate_partials(algebra: PresentedAlgebra) -> dict[str, Derivation]:
    one = algebra.ring.one()
    return {c: Derivation(algebra, {c: one}) for c in algebra.coordinates}


class PoissonStructure:
    """Antisymmetric table on coordinate pairs, extended as a biderivation."""

    def __init__(self, algebra: PresentedAlgebra, table: Mapping[tuple[str, str], Poly], name: str = ""):
        self.algebra = algebra
        self.name = name or algebra.name
        coords = algebra.coordinates
        entries: dict[tuple[str, str], Poly] = {}
        for (u, v), val in table.items():
            if u not in coords or v not in coords:
                raise AlgebraError(f"table entry ({u},{v}) is not on coordinates")
            if u == v:
                if algebra.normal_form(val):
                    raise AlgebraError(f"q({u},{u}) must vanish")
                continue
            key, sign = ((u, v), 1) if coords.index(u) < coords.index(v) else ((v, u), -1)
            val = algebra.normal_form(val * sign)
            if key in entries and entries[key] != val:
                raise AlgebraError(f"inconsistent entries for q{key}")
            entries[key] = val
        self.table = {k: v for k, v in entries.items() if v}
        self._partials = coordinate_partials(algebra)

    def entry(self, u: str, v: str) -> Poly:
        ring = self.algebra.ring
        if u == v:
            return ring.zero()
        coords = self.algebra.coordinates
        if coords.index(u) < coords.index(v):
            return self.table.get((u, v), ring.zero())
        return -self.table.get((v, u), ring.zero())

    def __call__(self, f: Poly, g: Poly) -> Poly:
        return self.bracket(f, g)

    def bracket(self, f: Poly, g: Poly) -> Poly:
        if not self.table:
            return self.algebra.ring.zero()
        df: dict[str, Poly] = {}
        dg: dict[str, Poly] = {}
        for u, v in self.table:
            for c in (u, v):
                if c not in df:
                    df[c] = self._partials[c].raw(f)
                    dg[c] = self._partials[c].raw(g)
        out = self.algebra.ring.zero()
        for (u, v), t in self.table.items():
            term = df[u] * dg[v] - df[v] * dg[u]
            if term:
                out = out + t * term
        return self.algebra.normal_form(out)

    def same_table(self, other: "PoissonStructure") -> bool:
        coords = self.algebra.coordinates
        return all(
            self.algebra.equal(self.entry(u, v), other.entry(u, v)) for u, v in combinations(coords, 2)
        )

    def scaled(self, factor: Fraction | int) -> "PoissonStructure":
        return PoissonStructure(self.algebra, {k: v * factor for k, v in self.table.items()}, self.name)


def bracket_eval(q: PoissonStructure, f: Poly, g: Poly) -> Poly:
    return q.bracket(f, g)


def jacobi_defect(q: PoissonStructure, f: Poly, g: Poly, h: Poly) -> Poly:
    return q.algebra.normal_form(q(q(f, g), h) + q(q(g, h), f) + q(q(h, f), g))


def hamiltonian_field(q: PoissonStructure, a: Poly, side: str = "left") -> Derivation:
    """``side='left'`` gives ``q(., a)``; ``side='right'`` gives ``q(a, .)``."""
    ring = q.algebra.ring
    images = {}
    for c in q.algebra.coordinates:
        x = ring.gen(c)
        if side == "left":
            images[c] = q(x, a)
        elif side == "right":
            images[c] = q(a, x)
        else:
            raise ValueError(f"side must be 'left' or 'right', not {side!r}")
    return Derivation(q.algebra, images)


def commutator_defect(D1: Derivation, D2: Derivation, f: Poly) -> Poly:
    return D1.algebra.normal_form(D1(D2(f)) - D2(D1(f)))


@dataclass(frozen=True)
class Relation:
    label: str
    expected: Fraction
    value: Poly

    @property
    def passed(self) -> bool:
        return self.value == self.value.ring.const(self.expected)


@dataclass(frozen=True)
class DarbouxReport:
    relations: tuple[Relation, ...]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.relations)

    def failures(self) -> list[Relation]:
        return [r for r in self.relations if not r.passed]

    def lines(self) -> list[str]:
        return [
            f"{'pass' if r.passed else 'FAIL'}  {r.label} = {r.value.to_text()} (expected {r.expected})"
            for r in self.relations
        ]


def darboux_verify(q: PoissonStructure, pairs: Sequence[tuple[Poly, Poly]]) -> DarbouxReport:
    rels = []
    n = len(pairs)
    for i in range(n):
        for j in range(n):
            rels.append(Relation(f"q(a{i+1},b{j+1})", Fraction(int(i == j)), q(pairs[i][0], pairs[j][1])))
    for i, j in combinations(range(n), 2):
        rels.append(Relation(f"q(a{i+1},a{j+1})", Fraction(0), q(pairs[i][0], pairs[j][0])))
        rels.append(Relation(f"q(b{i+1},b{j+1})", Fraction(0), q(pairs[i][1], pairs[j][1])))
    return DarbouxReport(tuple(rels))


class DarbouxError(AlgebraError):
    def __init__(self, report: DarbouxReport):
        super().__init__("Darboux relations fail: " + "; ".join(
            f"{r.label}={r.value.to_text()}" for r in report.failures()))
        self.report = report


class DarbouxSystem:
    """Verified pairs with their fields ``A_k = q(., b_k)`` and ``B_k = q(a_k, .)``."""

    def __init__(self, structure: PoissonStructure, pairs: Iterable[tuple[Poly, Poly]]):
        alg = structure.algebra
        self.structure = structure
        self.algebra = alg
        self.pairs = tuple((alg.normal_form(a), alg.normal_form(b)) for a, b in pairs)
        self.report = darboux_verify(structure, self.pairs)
        if not self.report.passed:
            raise DarbouxError(self.report)
        self.A = tuple(hamiltonian_field(structure, b, "left") for _, b in self.pairs)
        self.B = tuple(hamiltonian_field(structure, a, "right") for a, _ in self.pairs)

    @property
    def n(self) -> int:
        return len(self.pairs)

    def fields(self) -> tuple[Derivation, ...]:
        return self.A + self.B


def reconstruct_bracket(sys: DarbouxSystem) -> PoissonStructure:
    alg = sys.algebra
    table = {}
    for u, v in combinations(alg.coordinates, 2):
        val = alg.ring.zero()
        for A, B in zip(sys.A, sys.B):
            val = val + A.images[u] * B.images[v] - B.images[u] * A.images[v]
        table[(u, v)] = val
    return PoissonStructure(alg, table, name=f"{sys.structure.name}-reconstructed")


class DiffOperator:
    """Linear differential operator over the coordinates with algebra-valued coefficients.

    Keys are multi-indices (derivative counts per coordinate). Applied to
    representatives written in the coordinates only.
    """

    def __init__(self, algebra: PresentedAlgebra, coeffs: Mapping[tuple[int, ...], Poly]):
        self.algebra = algebra
        self.coeffs = {k: algebra.normal_form(v) for k, v in coeffs.items()}
        self.coeffs = {k: v for k, v in self.coeffs.items() if v}

    @classmethod
    def identity(cls, algebra: PresentedAlgebra) -> "DiffOperator":
        return cls(algebra, {(0,) * len(algebra.coordinates): algebra.ring.one()})

    @classmethod
    def from_derivation(cls, D: Derivation) -> "DiffOperator":
        coords = D.algebra.coordinates
        out = {}
        for i, c in enumerate(coords):
            key = tuple(int(j == i) for j in range(len(coords)))
            out[key] = D.images[c]
        return cls(D.algebra, out)

    def after(self, D: Derivation) -> "DiffOperator":
        """The composite ``D o self``."""
        coords = self.algebra.coordinates
        out: dict[tuple[int, ...], Poly] = {}
        for key, c in self.coeffs.items():
            dc = D(c)
            if dc:
                out[key] = out.get(key, self.algebra.ring.zero()) + dc
            for i, name in enumerate(coords):
                img = D.images[name]
                if img:
                    k2 = key[:i] + (key[i] + 1,) + key[i + 1 :]
                    out[k2] = out.get(k2, self.algebra.ring.zero()) + c * img
        return DiffOperator(self.algebra, out)

    def order(self) -> int:
        return max((sum(k) for k in self.coeffs), default=-1)

    def part(self, order: int) -> dict[tuple[int, ...], Poly]:
        return {k: v for k, v in self.coeffs.items() if sum(k) == order}

    def norm(self, order: int | None = None) -> Fraction:
        """Sum of absolute coefficients, optionally restricted to one order."""
        return sum(
            (v.coeff_sum() for k, v in self.coeffs.items() if order is None or sum(k) == order),
            Fraction(0),
        )

    def apply(self, f: Poly) -> Poly:
        coords = self.algebra.coordinates
        out = self.algebra.ring.zero()
        for key, c in self.coeffs.items():
            g = f
            for name, cnt in zip(coords, key):
                for _ in range(cnt):
                    g = g.partial(name)
            if g:
                out = out + c * g
        return self.algebra.normal_form(out)

    def to_text(self) -> str:
        coords = self.algebra.coordinates
        parts = []
        for key in sorted(self.coeffs, key=lambda k: (-sum(k), tuple(-x for x in k))):
            d = "*".join(
                f"d{c}" if n == 1 else f"d{c}^{n}" for c, n in zip(coords, key) if n
            )
            parts.append(f"({self.coeffs[key].to_text()})" + (f"*{d}" if d else ""))
        return " + ".join(parts) or "0"
