"""Exact Laurent polynomials with fractional exponents, and presented algebras.

Exponents are stored as integers scaled by each generator's radical order, so
``s1^{1/2}`` in a ring where ``s1`` has radical order 2 is the integer 1.
Coefficients are :class:`fractions.Fraction`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt
from typing import Iterable, Mapping, Union

Scalar = Union[int, Fraction]
Mono = tuple  # tuple[int, ...], scaled exponents aligned with Ring.generators

STEP_BUDGET = 10**6


class AlgebraError(ValueError):
    pass


class LatticeError(AlgebraError):
    """An exponent does not lie on a generator's radical lattice."""


class NegativeExponentError(AlgebraError):
    """A user-facing result carries a negative power of a non-invertible generator."""


class RewriteBudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class Generator:
    name: str
    radical_order: int = 1
    invertible: bool = False

    def __post_init__(self) -> None:
        if self.radical_order < 1:
            raise AlgebraError(f"radical order of {self.name} must be >= 1")


class Ring:
    """A namespace of generators; polynomials only combine within one ring."""

    def __init__(self, generators: Iterable[Generator]):
        self.generators = tuple(generators)
        self.names = tuple(g.name for g in self.generators)
        if len(set(self.names)) != len(self.names):
            raise AlgebraError(f"duplicate generator names in {self.names}")
        self.index = {n: i for i, n in enumerate(self.names)}
        self.orders = tuple(g.radical_order for g in self.generators)
        self.one_mono: Mono = (0,) * len(self.generators)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Ring) and self.generators == other.generators

    def __hash__(self) -> int:
        return hash(self.generators)

    def __repr__(self) -> str:
        return f"Ring({', '.join(self.names)})"

    def scaled(self, name: str, exponent: Scalar) -> int:
        i = self.index[name]
        e = Fraction(exponent) * self.orders[i]
        if e.denominator != 1:
            raise LatticeError(
                f"exponent {exponent} of {name} is outside the lattice (1/{self.orders[i]})Z"
            )
        return int(e)

    def exponent(self, i: int, scaled: int) -> Fraction:
        return Fraction(scaled, self.orders[i])

    def mono(self, exps: Mapping[str, Scalar] | None = None) -> Mono:
        out = [0] * len(self.generators)
        for name, e in (exps or {}).items():
            out[self.index[name]] = self.scaled(name, e)
        return tuple(out)

    def const(self, c: Scalar) -> "Poly":
        c = Fraction(c)
        return Poly(self, {self.one_mono: c} if c else {})

    def zero(self) -> "Poly":
        return Poly(self, {})

    def one(self) -> "Poly":
        return self.const(1)

    def gen(self, name: str, exponent: Scalar = 1) -> "Poly":
        return Poly(self, {self.mono({name: exponent}): Fraction(1)})

    def monomial(self, coeff: Scalar = 1, **exps: Scalar) -> "Poly":
        c = Fraction(coeff)
        return Poly(self, {self.mono(exps): c} if c else {})

    def __getitem__(self, name: str) -> "Poly":
        return self.gen(name)


def _mono_mul(a: Mono, b: Mono) -> Mono:
    return tuple(x + y for x, y in zip(a, b))


class Poly:
    """Immutable sparse Laurent polynomial over Q with lattice exponents."""

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring: Ring, terms: Mapping[Mono, Fraction] | None = None):
        self.ring = ring
        self.terms: dict[Mono, Fraction] = {m: c for m, c in (terms or {}).items() if c}
        self._hash: int | None = None

    # -- construction helpers -------------------------------------------------
    def _coerce(self, other: object) -> "Poly":
        if isinstance(other, Poly):
            if other.ring != self.ring:
                raise AlgebraError(f"ring mismatch: {self.ring} vs {other.ring}")
            return other
        if isinstance(other, (int, Fraction)):
            return self.ring.const(other)
        return NotImplemented  # type: ignore[return-value]

    # -- arithmetic -----------------------------------------------------------
    def __add__(self, other: object) -> "Poly":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        terms = dict(self.terms)
        for m, c in o.terms.items():
            terms[m] = terms.get(m, 0) + c
        return Poly(self.ring, terms)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly(self.ring, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other: object) -> "Poly":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other: object) -> "Poly":
        return (-self) + other

    def __mul__(self, other: object) -> "Poly":
        if isinstance(other, (int, Fraction)):
            if not other:
                return self.ring.zero()
            return Poly(self.ring, {m: c * other for m, c in self.terms.items()})
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        out: dict[Mono, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in o.terms.items():
                m = _mono_mul(m1, m2)
                out[m] = out.get(m, 0) + c1 * c2
        return Poly(self.ring, out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Poly":
        if not isinstance(n, int):
            raise TypeError("use Poly.power for rational exponents")
        if n < 0:
            return self.power(n)
        result = self.ring.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def power(self, e: Scalar) -> "Poly":
        """Rational power; only defined for single terms with a perfect-power coefficient."""
        e = Fraction(e)
        if e.denominator == 1 and e >= 0:
            return self ** int(e)
        if len(self.terms) != 1:
            raise AlgebraError(f"cannot raise a {len(self.terms)}-term polynomial to {e}")
        (m, c), = self.terms.items()
        coeff = rational_power(c, e)
        exps = []
        for i, x in enumerate(m):
            y = Fraction(x) * e
            if y.denominator != 1:
                raise LatticeError(
                    f"{self.ring.names[i]}^{self.ring.exponent(i, x)} raised to {e} leaves the lattice"
                )
            exps.append(int(y))
        return Poly(self.ring, {tuple(exps): coeff})

    # -- comparison -----------------------------------------------------------
    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = self.ring.const(other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.ring == other.ring and self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.ring, frozenset(self.terms.items())))
        return self._hash

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    # -- inspection -----------------------------------------------------------
    def exponents(self, mono: Mono) -> dict[str, Fraction]:
        return {
            self.ring.names[i]: self.ring.exponent(i, x) for i, x in enumerate(mono) if x
        }

    def degree(self) -> Fraction:
        """Maximal total degree (sum of rational exponents); -1 for zero."""
        if not self.terms:
            return Fraction(-1)
        return max(self._mono_degree(m) for m in self.terms)

    def _mono_degree(self, m: Mono) -> Fraction:
        return sum((self.ring.exponent(i, x) for i, x in enumerate(m)), Fraction(0))

    def constant_term(self) -> Fraction:
        return self.terms.get(self.ring.one_mono, Fraction(0))

    def coeff_sum(self) -> Fraction:
        return sum((abs(c) for c in self.terms.values()), Fraction(0))

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def uses(self) -> set[str]:
        out = set()
        for m in self.terms:
            out.update(self.ring.names[i] for i, x in enumerate(m) if x)
        return out

    def min_exponent(self, name: str) -> Fraction | None:
        i = self.ring.index[name]
        if not self.terms:
            return None
        return self.ring.exponent(i, min(m[i] for m in self.terms))

    def sorted_terms(self) -> list[tuple[Mono, Fraction]]:
        """Terms in graded lexicographic order (declaration order, largest first)."""
        return sorted(
            self.terms.items(),
            key=lambda mc: (-self._mono_degree(mc[0]), tuple(-self.ring.exponent(i, x) for i, x in enumerate(mc[0]))),
        )

    # -- calculus -------------------------------------------------------------
    def partial(self, name: str) -> "Poly":
        i = self.ring.index[name]
        d = self.ring.orders[i]
        out: dict[Mono, Fraction] = {}
        for m, c in self.terms.items():
            x = m[i]
            if x:
                m2 = m[:i] + (x - d,) + m[i + 1 :]
                out[m2] = out.get(m2, 0) + c * Fraction(x, d)
        return Poly(self.ring, out)

    def substitute(self, bind: Mapping[str, "Poly"], target: Ring | None = None) -> "Poly":
        """Ring homomorphism sending generators in ``bind`` to images in ``target``.

        Unbound generators map to the same-named generator of ``target``.
        Fractional or negative exponents need single-term images.
        """
        target = target or self.ring
        powers: dict[tuple[int, int], Poly] = {}

        def image_power(i: int, x: int) -> Poly:
            key = (i, x)
            if key not in powers:
                name = self.ring.names[i]
                img = bind.get(name)
                if img is None:
                    powers[key] = target.gen(name).power(self.ring.exponent(i, x))
                else:
                    if img.ring != target:
                        raise AlgebraError(f"image of {name} is not in the target ring")
                    e = self.ring.exponent(i, x)
                    if e.denominator == 1 and e >= 0:
                        powers[key] = img ** int(e)
                    elif img.is_zero():
                        raise AlgebraError(f"negative or fractional power of zero image for {name}")
                    else:
                        powers[key] = img.power(e)
            return powers[key]

        out = target.zero()
        for m, c in self.terms.items():
            term = target.const(c)
            for i, x in enumerate(m):
                if x:
                    term = term * image_power(i, x)
            out = out + term
        return out

    def to_ring(self, target: Ring) -> "Poly":
        """Re-embed into a ring that declares (at least) the same generator names."""
        out: dict[Mono, Fraction] = {}
        for m, c in self.terms.items():
            exps = {self.ring.names[i]: self.ring.exponent(i, x) for i, x in enumerate(m) if x}
            out[target.mono(exps)] = c
        return Poly(target, out)

    # -- text -----------------------------------------------------------------
    def to_text(self) -> str:
        if not self.terms:
            return "0"
        parts: list[str] = []
        for k, (m, c) in enumerate(self.sorted_terms()):
            sign = "-" if c < 0 else "+"
            a = abs(c)
            factors = []
            for i, x in enumerate(m):
                if not x:
                    continue
                e = self.ring.exponent(i, x)
                name = self.ring.names[i]
                factors.append(name if e == 1 else f"{name}^{{{e}}}")
            if not factors:
                body = _fmt_rational(a)
            elif a == 1:
                body = "*".join(factors)
            else:
                body = _fmt_rational(a) + "*" + "*".join(factors)
            if k == 0:
                parts.append(("-" if sign == "-" else "") + body)
            else:
                parts.append(f" {sign} {body}")
        return "".join(parts)

    def __str__(self) -> str:
        return self.to_text()

    def __repr__(self) -> str:
        return f"Poly({self.to_text()!r})"


def _fmt_rational(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _int_root(n: int, q: int) -> int | None:
    if n < 0:
        if q % 2 == 0:
            return None
        r = _int_root(-n, q)
        return None if r is None else -r
    if q == 2:
        r = isqrt(n)
        return r if r * r == n else None
    r = round(n ** (1.0 / q))
    for cand in (r - 1, r, r + 1):
        if cand >= 0 and cand**q == n:
            return cand
    return None


def rational_power(c: Fraction, e: Fraction) -> Fraction:
    c = Fraction(c)
    if c == 0:
        if e <= 0:
            raise ZeroDivisionError("0 to a non-positive power")
        return Fraction(0)
    p, q = e.numerator, e.denominator
    num = _int_root(c.numerator, q)
    den = _int_root(c.denominator, q)
    if num is None or den is None:
        raise AlgebraError(f"{c} is not a perfect {q}-th power")
    root = Fraction(num, den)
    return root**p


@dataclass(frozen=True)
class RewriteRule:
    """``lhs -> rhs``; a monomial matches when it is divisible by ``lhs``.

    With ``when_negative`` set, the named generator must also carry a negative
    exponent in the matched monomial (used for cancellations in localizations).
    """

    lhs: Mono
    rhs: Poly
    when_negative: int | None = None
    note: str = ""

    def matches(self, mono: Mono) -> bool:
        if self.when_negative is not None and mono[self.when_negative] >= 0:
            return False
        return all(m >= l for m, l in zip(mono, self.lhs) if l > 0) and all(
            m <= l for m, l in zip(mono, self.lhs) if l < 0
        )


def make_rule(lhs: Poly, rhs: Poly, when_negative: str | None = None, note: str = "") -> RewriteRule:
    if not lhs.is_monomial() or lhs.terms[next(iter(lhs.terms))] != 1:
        raise AlgebraError("rule lhs must be a monic monomial")
    mono = next(iter(lhs.terms))
    if when_negative is None:
        probe = RewriteRule(mono, rhs)
        for m in rhs.terms:
            if any(mono) and probe.matches(m):
                raise AlgebraError(f"rule lhs {lhs} divides a term of its rhs {rhs}")
    neg = None if when_negative is None else lhs.ring.index[when_negative]
    return RewriteRule(mono, rhs, neg, note)


@dataclass
class _Budget:
    remaining: int

    def spend(self) -> None:
        self.remaining -= 1
        if self.remaining < 0:
            raise RewriteBudgetExceeded("rewrite step budget exhausted; rule set may not terminate")


@dataclass(eq=False)
class PresentedAlgebra:
    """A commutative algebra given by generators and terminating rewrite rules.

    ``coordinates`` are the generators a Poisson table is written over (all of
    them by default). ``differentials`` expresses each derived generator's
    differential as ``{generator: coefficient}``; derivations extend through it.
    """

    name: str
    ring: Ring
    rules: tuple[RewriteRule, ...] = ()
    coordinates: tuple[str, ...] = ()
    differentials: Mapping[str, Mapping[str, Poly]] = field(default_factory=dict)
    measure: str = ""
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        self.rules = tuple(self.rules)
        if not self.coordinates:
            self.coordinates = tuple(n for n in self.ring.names if n not in self.differentials)
        for n in self.coordinates:
            if n not in self.ring.index:
                raise AlgebraError(f"unknown coordinate {n}")

    @property
    def generators(self) -> tuple[Generator, ...]:
        return self.ring.generators

    def __getitem__(self, name: str) -> Poly:
        return self.ring.gen(name)

    def normal_form(self, p: Poly, budget: int = STEP_BUDGET) -> Poly:
        if p.ring != self.ring:
            raise AlgebraError(f"{p!r} does not live in algebra {self.name}")
        if not self.rules:
            return p
        b = _Budget(budget)
        out: dict[Mono, Fraction] = {}
        try:
            for m, c in p.terms.items():
                for m2, c2 in self._reduce(m, b).items():
                    out[m2] = out.get(m2, 0) + c * c2
        except RecursionError as exc:
            raise RewriteBudgetExceeded("rewriting recursed too deeply; rule set may not terminate") from exc
        return Poly(self.ring, out)

    def _reduce(self, mono: Mono, budget: _Budget) -> dict[Mono, Fraction]:
        hit = self._cache.get(mono)
        if hit is not None:
            return hit
        for rule in self.rules:
            if rule.matches(mono):
                budget.spend()
                rest = tuple(a - b for a, b in zip(mono, rule.lhs))
                acc: dict[Mono, Fraction] = {}
                for m2, c2 in rule.rhs.terms.items():
                    for m3, c3 in self._reduce(_mono_mul(rest, m2), budget).items():
                        acc[m3] = acc.get(m3, 0) + c2 * c3
                result = {m: c for m, c in acc.items() if c}
                break
        else:
            result = {mono: Fraction(1)}
        self._cache[mono] = result
        return result

    def nf(self, p: Poly) -> Poly:
        return self.normal_form(p)

    def mul(self, *factors: Poly) -> Poly:
        out = self.ring.one()
        for f in factors:
            out = self.normal_form(out * f)
        return out

    def equal(self, p: Poly, q: Poly) -> bool:
        return self.normal_form(p - q).is_zero()

    def check_user_facing(self, p: Poly) -> Poly:
        for m in p.terms:
            for i, x in enumerate(m):
                if x < 0 and not self.ring.generators[i].invertible:
                    raise NegativeExponentError(
                        f"{self.ring.names[i]} is not invertible but appears with exponent "
                        f"{self.ring.exponent(i, x)} in {p.to_text()}"
                    )
        return p


def poly_mul(p: Poly, q: Poly) -> Poly:
    return p * q


def normal_form(p: Poly, alg: PresentedAlgebra) -> Poly:
    return alg.normal_form(p)


def poly_equal(p: Poly, q: Poly, alg: PresentedAlgebra) -> bool:
    return alg.equal(p, q)


def partial(p: Poly, g: str) -> Poly:
    return p.partial(g)


def substitute(p: Poly, bind: Mapping[str, Poly], target: Ring | None = None) -> Poly:
    return p.substitute(bind, target)
