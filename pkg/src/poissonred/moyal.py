"""Groenewold-Moyal star product built from a Darboux system.

With commuting fields ``A_i = q(., b_i)`` and ``B_i = q(a_i, .)`` the k-th
term is ``Q_k = P^k`` applied to ``f (x) g`` where
``P = sum_i (A_i (x) B_i - B_i (x) A_i)``, so that ``Q_1 = q``. Since the
fields commute, ``P^k`` is collected by how often each field hits ``f``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial
from typing import Iterator

from .algebra import Poly
from .derivations import DarbouxSystem, DiffOperator

MAX_ORDER = 8
TERM_BUDGET = 10**7


class ResourceLimitError(RuntimeError):
    pass


def _guard(k: int, max_order: int) -> None:
    if k < 0:
        raise ValueError("order must be non-negative")
    if k > max_order:
        raise ResourceLimitError(f"order {k} exceeds the configured maximum {max_order}")


def compositions(k: int, parts: int) -> Iterator[tuple[int, ...]]:
    if parts == 1:
        yield (k,)
        return
    for first in range(k + 1):
        for rest in compositions(k - first, parts - 1):
            yield (first,) + rest


class FieldPowers:
    """Memoized ``A^p B^m (f)`` for multi-exponents ``p, m`` (one entry per pair)."""

    def __init__(self, sys: DarbouxSystem, f: Poly):
        self.fields = sys.A + sys.B
        self.cache: dict[tuple[int, ...], Poly] = {(0,) * len(self.fields): sys.algebra.normal_form(f)}

    def __call__(self, key: tuple[int, ...]) -> Poly:
        hit = self.cache.get(key)
        if hit is not None:
            return hit
        i = next(j for j, e in enumerate(key) if e)
        prev = key[:i] + (key[i] - 1,) + key[i + 1 :]
        val = self.fields[i](self(prev))
        self.cache[key] = val
        return val


def moyal_term(
    sys: DarbouxSystem,
    k: int,
    f: Poly,
    g: Poly,
    *,
    max_order: int = MAX_ORDER,
    _powers: tuple[FieldPowers, FieldPowers] | None = None,
) -> Poly:
    _guard(k, max_order)
    alg = sys.algebra
    if k == 0:
        return alg.mul(f, g)
    n = sys.n
    fp, gp = _powers or (FieldPowers(sys, f), FieldPowers(sys, g))
    budget = TERM_BUDGET
    out = alg.ring.zero()
    kf = factorial(k)
    for split in compositions(k, 2 * n):
        budget -= 1
        if budget < 0:
            raise ResourceLimitError("term budget exceeded")
        p, m = split[:n], split[n:]
        left = fp(p + m)
        if not left:
            continue
        right = gp(m + p)
        if not right:
            continue
        denom = 1
        for e in split:
            denom *= factorial(e)
        coeff = Fraction(kf, denom) * (-1) ** sum(m)
        out = out + coeff * (left * right)
    return alg.normal_form(out)


@dataclass(frozen=True)
class StarTruncation:
    """Coefficients ``c_k = Q_k(f, g) / k!`` of ``t^k`` for ``k <= order``."""

    order: int
    coefficients: tuple[Poly, ...]

    def __getitem__(self, k: int) -> Poly:
        return self.coefficients[k]

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coefficients)

    def __sub__(self, other: "StarTruncation") -> "StarTruncation":
        K = min(self.order, other.order)
        return StarTruncation(K, tuple(a - b for a, b in zip(self.coefficients[: K + 1], other.coefficients)))

    def lines(self) -> list[str]:
        return [f"t^{k}: {c.to_text()}" for k, c in enumerate(self.coefficients)]


def star_truncated(sys: DarbouxSystem, K: int, f: Poly, g: Poly, *, max_order: int = MAX_ORDER) -> StarTruncation:
    _guard(K, max_order)
    powers = (FieldPowers(sys, f), FieldPowers(sys, g))
    coeffs = tuple(
        moyal_term(sys, k, f, g, max_order=max_order, _powers=powers) * Fraction(1, factorial(k))
        for k in range(K + 1)
    )
    return StarTruncation(K, coeffs)


def star_series(sys: DarbouxSystem, K: int, F: StarTruncation, G: StarTruncation, *, max_order: int = MAX_ORDER) -> StarTruncation:
    """Star product of two truncated series, truncated at ``K``."""
    alg = sys.algebra
    out = [alg.ring.zero() for _ in range(K + 1)]
    for a in range(min(K, F.order) + 1):
        for b in range(min(K, G.order) + 1):
            if a + b > K or F[a].is_zero() or G[b].is_zero():
                continue
            st = star_truncated(sys, K - a - b, F[a], G[b], max_order=max_order)
            for c in range(K - a - b + 1):
                out[a + b + c] = out[a + b + c] + st[c]
    return StarTruncation(K, tuple(alg.normal_form(c) for c in out))


def _const_series(K: int, f: Poly) -> StarTruncation:
    zero = f.ring.zero()
    return StarTruncation(K, (f,) + (zero,) * K)


def associativity_defect(sys: DarbouxSystem, K: int, f: Poly, g: Poly, h: Poly, *, max_order: int = MAX_ORDER) -> StarTruncation:
    _guard(K, max_order)
    fg = star_truncated(sys, K, f, g, max_order=max_order)
    gh = star_truncated(sys, K, g, h, max_order=max_order)
    left = star_series(sys, K, fg, _const_series(K, h), max_order=max_order)
    right = star_series(sys, K, _const_series(K, f), gh, max_order=max_order)
    alg = sys.algebra
    return StarTruncation(K, tuple(alg.normal_form(a - b) for a, b in zip(left.coefficients, right.coefficients)))


def closed_form_term(sys: DarbouxSystem, k: int, a: Poly, b: Poly, *, max_order: int = MAX_ORDER) -> Poly:
    """The one-pair closed forms: squares of A and B for even k, brackets for odd k."""
    _guard(k, max_order)
    if sys.n != 1:
        raise ValueError("closed forms need exactly one Darboux pair")
    alg = sys.algebra
    A, B = sys.A[0], sys.B[0]
    q = sys.structure

    def apply(ops: str, x: Poly) -> Poly:
        for op in reversed(ops):
            x = (A if op == "A" else B)(x)
        return x

    if k == 0:
        return alg.mul(a, b)
    out = alg.ring.zero()
    if k % 2 == 0:
        half = k // 2
        for i in range(half + 1):
            j = half - i
            c = Fraction(factorial(k), factorial(2 * i) * factorial(2 * j))
            out = out + c * apply("A" * (2 * i) + "B" * (2 * j), a) * apply("B" * (2 * i) + "A" * (2 * j), b)
        for i in range(half):
            j = half - 1 - i
            c = Fraction(factorial(k), factorial(2 * i + 1) * factorial(2 * j + 1))
            out = out - c * apply("AB" + "A" * (2 * i) + "B" * (2 * j), a) * apply("AB" + "A" * (2 * j) + "B" * (2 * i), b)
    else:
        for i in range(k):
            j = k - 1 - i
            c = Fraction((-1) ** j * factorial(k - 1), factorial(i) * factorial(j))
            out = out + c * q(apply("A" * i + "B" * j, a), apply("A" * j + "B" * i, b))
    return alg.normal_form(out)


def closed_form_crosscheck(sys: DarbouxSystem, k: int, f: Poly, g: Poly, *, max_order: int = MAX_ORDER) -> bool:
    return moyal_term(sys, k, f, g, max_order=max_order) == closed_form_term(sys, k, f, g, max_order=max_order)


def field_operators(sys: DarbouxSystem, k: int) -> dict[tuple[int, ...], DiffOperator]:
    """Differential operators ``prod A_i^{p_i} B_i^{m_i}`` of total order ``<= k``."""
    fields = sys.A + sys.B
    ops = {(0,) * len(fields): DiffOperator.identity(sys.algebra)}
    for total in range(1, k + 1):
        for key in compositions(total, len(fields)):
            i = next(j for j, e in enumerate(key) if e)
            prev = key[:i] + (key[i] - 1,) + key[i + 1 :]
            ops[key] = ops[prev].after(fields[i])
    return ops


def bidifferential_coefficients(
    sys: DarbouxSystem, k: int, *, max_order: int = MAX_ORDER
) -> dict[tuple[tuple[int, ...], tuple[int, ...]], Poly]:
    """``Q_k`` written as ``sum c_{ab} d^a (x) d^b`` over the coordinates."""
    _guard(k, max_order)
    alg = sys.algebra
    n = sys.n
    ops = field_operators(sys, k)
    acc: dict[tuple[tuple[int, ...], tuple[int, ...]], Poly] = {}
    kf = factorial(k)
    for split in compositions(k, 2 * n):
        p, m = split[:n], split[n:]
        denom = 1
        for e in split:
            denom *= factorial(e)
        coeff = Fraction(kf, denom) * (-1) ** sum(m)
        left, right = ops[p + m], ops[m + p]
        for ka, ca in left.coeffs.items():
            for kb, cb in right.coeffs.items():
                key = (ka, kb)
                acc[key] = acc.get(key, alg.ring.zero()) + coeff * (ca * cb)
    out = {}
    for key, v in acc.items():
        v = alg.normal_form(v)
        if v:
            out[key] = v
    return out


def apply_bidifferential(sys: DarbouxSystem, coeffs, f: Poly, g: Poly) -> Poly:
    alg = sys.algebra
    coords = alg.coordinates

    def deriv(x: Poly, key: tuple[int, ...]) -> Poly:
        for name, cnt in zip(coords, key):
            for _ in range(cnt):
                x = x.partial(name)
        return x

    out = alg.ring.zero()
    for (ka, kb), c in coeffs.items():
        out = out + c * deriv(f, ka) * deriv(g, kb)
    return alg.normal_form(out)


def binomial_reference(k: int) -> list[tuple[int, int]]:
    """(sign * C(k, p), p) for the one-pair Moyal sum; used in docs and tests."""
    return [((-1) ** (k - p) * comb(k, p), p) for p in range(k + 1)]
