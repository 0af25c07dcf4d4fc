"""Numerical side of the convergence theorem for the cone.

On the cone ``s3 = sqrt(s1) sqrt(s2)`` the Darboux pair is ``u = sqrt(s1)``,
``v = sqrt(s2)``, so ``s = (u^2, v^2, uv)`` and the fields are ``A = d/du``,
``B = d/dv``. A polynomial in ``s`` becomes a polynomial in ``(u, v)`` and
``Q_k`` is the flat Moyal term there. Inputs are Taylor truncations of
exponentials of exponential type ``sigma``; with truncated inputs the series
terminates, so its tail can be summed outright.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .algebra import Generator, Poly, Ring
from .models import cone_algebra

RATIO_TOL = 1e-9
TAIL_TOL = 1e-6
DEFAULT_K = 24
DEFAULT_M = 24
DEFAULT_LAMBDA_F = (Fraction(1, 2), Fraction(1, 4), Fraction(1, 4))
DEFAULT_LAMBDA_G = (Fraction(1, 4), Fraction(1, 2), Fraction(1, 4))
SQRT2 = math.sqrt(2.0)


# -- norms -------------------------------------------------------------------------


@dataclass(frozen=True)
class NormEstimate:
    coeff_sum: float
    sample_max: float
    sample_count: int
    seed: int


def _numeric_terms(p: Poly) -> tuple[list[str], np.ndarray, np.ndarray]:
    """Variables (``r`` folded into coefficients as sqrt 2), exponent matrix, coefficients."""
    ring = p.ring
    names = [n for n in ring.names if n != "r"]
    idx = [ring.index[n] for n in names]
    r_i = ring.index.get("r")
    exps, coeffs = [], []
    for m, c in p.terms.items():
        val = float(c)
        if r_i is not None and m[r_i]:
            val *= SQRT2 ** float(ring.exponent(r_i, m[r_i]))
        exps.append([float(ring.exponent(i, m[i])) for i in idx])
        coeffs.append(val)
    return names, np.array(exps, dtype=float).reshape(len(coeffs), len(names)), np.array(coeffs, dtype=float)


def coeff_norm(p: Poly, samples: int = 10_000, seed: int = 0) -> NormEstimate:
    """Bracket ``max_{|s|=1} |p(s)|`` between a sampled value and ``sum |coefficients|``.

    Samples are uniform on the unit sphere of ``C^N`` over the generators of
    the ring (principal branches for fractional exponents).
    """
    names, exps, coeffs = _numeric_terms(p)
    total = float(np.abs(coeffs).sum())
    if not coeffs.size:
        return NormEstimate(0.0, 0.0, samples, seed)
    rng = np.random.default_rng(seed)
    n = max(len(names), 1)
    z = rng.standard_normal((samples, n)) + 1j * rng.standard_normal((samples, n))
    z /= np.linalg.norm(z, axis=1, keepdims=True)
    if not names:
        values = np.full(samples, coeffs.sum(), dtype=complex)
    else:
        values = np.zeros(samples, dtype=complex)
        for e, c in zip(exps, coeffs):
            values += c * np.prod(np.power(z, e), axis=1)
    return NormEstimate(total, float(np.abs(values).max()), samples, seed)


# -- entire functions ----------------------------------------------------------------


def truncate_entire(lam: Sequence[Fraction | int], M: int, ring: Ring | None = None) -> Poly:
    """Degree-``M`` Taylor truncation of ``exp(lam1*s1 + lam2*s2 + lam3*s3)`` (unreduced)."""
    if M < 0:
        raise ValueError("truncation degree must be non-negative")
    ring = ring or cone_algebra().ring
    lin = sum((Fraction(l) * ring[f"s{i+1}"] for i, l in enumerate(lam)), ring.zero())
    out, power = ring.one(), ring.one()
    for m in range(1, M + 1):
        power = power * lin * Fraction(1, m)
        out = out + power
    return out


def homogeneous_part(p: Poly, m: int) -> Poly:
    return Poly(p.ring, {mono: c for mono, c in p.terms.items() if p._mono_degree(mono) == m})


# -- flat coordinates on the cone ----------------------------------------------------------

UV = Ring([Generator("u"), Generator("v")])


def cone_to_uv(p: Poly) -> Poly:
    """Image under ``s1 -> u^2, s2 -> v^2, s3 -> uv`` (the Darboux chart)."""
    u, v = UV["u"], UV["v"]
    return p.substitute({"s1": u**2, "s2": v**2, "s3": u * v}, UV)


def uv_array(p: Poly) -> np.ndarray:
    """Coefficient array ``c[i, j]`` of ``u^i v^j``; negative exponents are rejected."""
    if p.ring is not UV and p.ring != UV:
        p = cone_to_uv(p)
    if not p.terms:
        return np.zeros((1, 1))
    for m in p.terms:
        if min(m) < 0:
            raise ValueError("series evaluation needs polynomial inputs")
    di = max(m[0] for m in p.terms)
    dj = max(m[1] for m in p.terms)
    out = np.zeros((di + 1, dj + 1))
    for (i, j), c in p.terms.items():
        out[i, j] = float(c)
    return out


def exp_uv_array(lam: Sequence[float], M: int) -> np.ndarray:
    """Array of the degree-``M`` truncation of ``exp(<lam, s>)`` in ``(u, v)``."""
    lin = np.zeros((3, 3))
    lin[2, 0], lin[0, 2], lin[1, 1] = float(lam[0]), float(lam[1]), float(lam[2])
    size = 2 * M + 1
    out = np.zeros((size, size))
    out[0, 0] = 1.0
    power = np.zeros((size, size))
    power[0, 0] = 1.0
    for m in range(1, M + 1):
        nxt = np.zeros((size, size))
        for (a, b) in ((2, 0), (0, 2), (1, 1)):
            if lin[a, b]:
                nxt[a:, b:] += lin[a, b] * power[: size - a, : size - b]
        power = nxt / m
        out += power
    return out


def derivative_table(c: np.ndarray, u0: float, v0: float) -> np.ndarray:
    """``D[a, b] = d^a/du^a d^b/dv^b F (u0, v0)`` for the polynomial with coefficients ``c``."""

    def shift(n: int, x: float) -> np.ndarray:
        P = np.zeros((n, n))
        for a in range(n):
            for i in range(a, n):
                P[a, i] = math.perm(i, a) * x ** (i - a)
        return P

    ni, nj = c.shape
    return shift(ni, u0) @ c @ shift(nj, v0).T


def moyal_terms_at(DF: np.ndarray, DG: np.ndarray, t: float) -> np.ndarray:
    """All ``t^k/k! Q_k(F, G)`` at the point, ``k = 0 .. deg F + deg G``."""
    kmax = min(DF.shape[0] + DF.shape[1], DG.shape[0] + DG.shape[1]) - 2
    out = np.zeros(max(kmax, 0) + 1)
    for k in range(kmax + 1):
        total = 0.0
        for p in range(k + 1):
            m = k - p
            if p < DF.shape[0] and m < DF.shape[1] and m < DG.shape[0] and p < DG.shape[1]:
                total += math.comb(k, p) * (-1) ** m * DF[p, m] * DG[m, p]
        out[k] = total * t**k / math.factorial(k)
    return out


def uv_moyal_term(k: int, F: Poly, G: Poly) -> Poly:
    """Exact flat Moyal term in ``(u, v)``; the chart image of ``Q_k`` on the cone."""

    def d(x: Poly, a: int, b: int) -> Poly:
        for _ in range(a):
            x = x.partial("u")
        for _ in range(b):
            x = x.partial("v")
        return x

    out = UV.zero()
    for p in range(k + 1):
        m = k - p
        out = out + math.comb(k, p) * (-1) ** m * d(F, p, m) * d(G, m, p)
    return out


# -- series evaluation ------------------------------------------------------------------


@dataclass
class SeriesResult:
    s_norm: float
    t: float
    K: int
    value: float
    last_term: float
    ratio: float
    tail_bound: float
    verdict: str
    chain_ratio: float
    in_theorem_ball: bool = False


def cone_point(s_norm: float, direction: tuple[float, float] = (1.0, 1.0)) -> tuple[float, float]:
    """``(u, v)`` along ``direction`` with ``|s| = |(u^2, v^2, uv)| = s_norm``."""
    if s_norm <= 0:
        raise ValueError("the point s = 0 is excluded (estimates carry |s|^(-k/2))")
    a, b = direction
    scale = math.sqrt(s_norm / math.sqrt(a**4 + b**4 + a * a * b * b))
    return a * scale, b * scale


def empirical_ratio(terms: np.ndarray, K: int, window: int = 4) -> float:
    """Geometric per-step growth of ``|T_k|`` over the last two windows ending at ``K``."""
    mags = np.abs(terms[: K + 1])
    hi = mags[max(K - window + 1, 0) : K + 1].sum()
    lo = mags[max(K - 2 * window + 1, 0) : max(K - window + 1, 0)].sum()
    if lo == 0:
        return 0.0 if hi == 0 else math.inf
    return float((hi / lo) ** (1.0 / window))


def verdict_for(ratio: float, tail: float, tol: float = TAIL_TOL) -> str:
    if ratio > 1 + RATIO_TOL:
        return "growing"
    if ratio < 1 - RATIO_TOL and tail < tol:
        return "converged"
    return "inconclusive"


def series_sum(
    f: Poly | np.ndarray,
    g: Poly | np.ndarray,
    s_norm: float,
    t: float,
    K: int = DEFAULT_K,
    tol: float = TAIL_TOL,
    *,
    eps: tuple[float, float] = (0.0, 0.0),
    M: int | None = None,
    direction: tuple[float, float] = (1.0, 1.0),
) -> SeriesResult:
    """Partial sum through ``t^K`` of the star product at a cone point.

    ``eps`` are the exponential types of the (truncated) inputs and ``M`` their
    truncation degree; the per-factor remainder ``(eps*|s|)^(M+1)/(M+1)!`` is
    added to the certified tail.
    """
    u0, v0 = cone_point(s_norm, direction)
    cf = f if isinstance(f, np.ndarray) else uv_array(f)
    cg = g if isinstance(g, np.ndarray) else uv_array(g)
    terms = moyal_terms_at(derivative_table(cf, u0, v0), derivative_table(cg, u0, v0), t)
    K = min(K, len(terms) - 1) if len(terms) else 0
    value = float(terms[: K + 1].sum())
    tail = float(np.abs(terms[K + 1 :]).sum())
    if M is not None:
        for e in eps:
            if e:
                tail += (e * s_norm) ** (M + 1) / math.factorial(M + 1)
    ratio = empirical_ratio(terms, K)
    big_eps = max(eps) if any(eps) else 0.0
    return SeriesResult(
        s_norm=s_norm,
        t=t,
        K=K,
        value=value,
        last_term=float(abs(terms[K])),
        ratio=ratio,
        tail_bound=tail,
        verdict=verdict_for(ratio, tail, tol),
        chain_ratio=18 * abs(t) * math.sqrt(big_eps),
    )


# -- grid scans --------------------------------------------------------------------------


def parse_axis(text: str) -> list[float]:
    """``a:b:n`` (n evenly spaced values, inclusive) or a comma list."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"range {text!r} must be start:stop:count")
        a, b, n = float(parts[0]), float(parts[1]), int(parts[2])
        if n < 1:
            raise ValueError("count must be positive")
        return [round(float(x), 12) for x in np.linspace(a, b, n)] if n > 1 else [a]
    return [float(x) for x in text.split(",") if x.strip()]


def parse_grid(spec: str) -> tuple[list[float], list[float]]:
    """``s=AXIS;t=AXIS``, e.g. ``s=0.05:0.2:4;t=0.025:0.1:4``."""
    axes = {}
    for part in spec.split(";"):
        if not part.strip():
            continue
        key, _, val = part.partition("=")
        key = key.strip()
        if key not in ("s", "t") or not val:
            raise ValueError(f"bad grid component {part!r}; expected s=... and t=...")
        axes[key] = parse_axis(val)
    if set(axes) != {"s", "t"}:
        raise ValueError("grid needs both s and t axes")
    if any(x <= 0 for x in axes["s"]):
        raise ValueError("s values must be positive")
    return axes["s"], axes["t"]


@dataclass
class ConvergenceReport:
    sigma: float
    K: int
    M: int
    lam_f: tuple[float, ...]
    lam_g: tuple[float, ...]
    points: list[SeriesResult] = field(default_factory=list)

    def in_ball_failures(self) -> list[SeriesResult]:
        return [p for p in self.points if p.in_theorem_ball and p.verdict != "converged"]

    def monotone_violations(self) -> list[tuple[SeriesResult, SeriesResult]]:
        """Pairs (inner, outer) where inner is growing though outer converged."""
        bad = []
        for outer in self.points:
            if outer.verdict != "converged":
                continue
            for inner in self.points:
                if inner.s_norm <= outer.s_norm and abs(inner.t) <= abs(outer.t) and inner.verdict == "growing":
                    bad.append((inner, outer))
        return bad

    def to_dict(self) -> dict:
        return {
            "sigma": self.sigma,
            "K": self.K,
            "M": self.M,
            "lambda_f": list(self.lam_f),
            "lambda_g": list(self.lam_g),
            "ball": {"s": 1 / (4 * self.sigma), "t": 1 / (9 * math.sqrt(self.sigma))},
            "points": [asdict(p) for p in self.points],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    def to_text(self) -> str:
        head = f"{'|s|':>8} {'t':>8} {'K':>3} {'sum':>14} {'last':>10} {'ratio':>8} {'tail':>10} {'ball':>4}  verdict"
        lines = [
            f"sigma={self.sigma}  K={self.K}  M={self.M}  ball |s|<{1 / (4 * self.sigma):.4g}, |t|<{1 / (9 * math.sqrt(self.sigma)):.4g}",
            head,
        ]
        for p in self.points:
            lines.append(
                f"{p.s_norm:8.4g} {p.t:8.4g} {p.K:3d} {p.value:14.8g} {p.last_term:10.3e} "
                f"{p.ratio:8.4f} {p.tail_bound:10.3e} {'yes' if p.in_theorem_ball else 'no':>4}  {p.verdict}"
            )
        return "\n".join(lines) + "\n"


def radius_scan(
    sigma: float,
    grid: str | tuple[Sequence[float], Sequence[float]],
    K: int = DEFAULT_K,
    M: int = DEFAULT_M,
    lam_f: Sequence[Fraction] = DEFAULT_LAMBDA_F,
    lam_g: Sequence[Fraction] = DEFAULT_LAMBDA_G,
    tol: float = TAIL_TOL,
) -> ConvergenceReport:
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    s_vals, t_vals = parse_grid(grid) if isinstance(grid, str) else grid
    lf = tuple(float(x) * sigma for x in lam_f)
    lg = tuple(float(x) * sigma for x in lam_g)
    cf, cg = exp_uv_array(lf, M), exp_uv_array(lg, M)
    eps = (sum(abs(x) for x in lf), sum(abs(x) for x in lg))
    rep = ConvergenceReport(sigma, K, M, lf, lg)
    s_ball, t_ball = 1 / (4 * sigma), 1 / (9 * math.sqrt(sigma))
    for s in s_vals:
        for t in t_vals:
            res = series_sum(cf, cg, s, t, K, tol, eps=eps, M=M)
            res.in_theorem_ball = bool(s < s_ball and abs(t) < t_ball)
            rep.points.append(res)
    return rep


# -- lemma probes ----------------------------------------------------------------------------


def random_homogeneous(ring: Ring, names: Sequence[str], m: int, rng: random.Random, terms: int = 4) -> Poly:
    out = ring.zero()
    for _ in range(terms):
        mono = ring.one()
        for _ in range(m):
            mono = mono * ring[rng.choice(list(names))]
        out = out + (rng.randint(-5, 5) or 1) * mono
    return out
