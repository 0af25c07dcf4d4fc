"""Acceptance criteria, one PASS/FAIL line each.

Run under pytest (lines appear in the terminal summary) or directly with
``python tests/test_acceptance.py [--seed S]``.
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import dataclass
from typing import Callable

import pytest

from poissonred.checks import (
    darboux_checks,
    hamiltonian_condition_check,
    invariant_closure_check,
    jacobi_checks,
    matrices_bracket_check,
    operator_constant_check,
    pullback_check,
    q2_conjecture_probe,
    reconstruction_checks,
    rho_identity_check,
)
from poissonred.models import build_model
from poissonred.report import Check
from poissonred.suites import convergence_suite, moyal_suite

SEED = 7
_CACHE: dict[tuple[str, int], list[Check]] = {}


def _cached(name: str, runner: Callable[[int], list[Check]], seed: int) -> list[Check]:
    if (name, seed) not in _CACHE:
        _CACHE[(name, seed)] = runner(seed)
    return _CACHE[(name, seed)]


def jacobi(seed: int) -> list[Check]:
    out: list[Check] = []
    for name in ("flat2", "flat3", "cone", "matrices", "k3-II", "k3-III", "k3-IV"):
        out += jacobi_checks(build_model(name), seed, n_random=50)
    return out


def darboux(seed: int) -> list[Check]:
    out: list[Check] = []
    for name in ("cone", "matrices", "k3-II", "k3-III", "k3-IV"):
        out += darboux_checks(build_model(name))
    return out


def reconstruction(seed: int) -> list[Check]:
    return reconstruction_checks(build_model("cone")) + reconstruction_checks(build_model("matrices"))


def reduction(seed: int) -> list[Check]:
    out: list[Check] = []
    for n in (2, 3):
        out += pullback_check(n) + hamiltonian_condition_check(n)
    for name in ("flat2", "flat3", "matrices"):
        out += invariant_closure_check(name)
    return out + rho_identity_check() + matrices_bracket_check()


_MOYAL_IDS = ("first-order", "parity", "unit", "associativity", "closed-forms")


def moyal(seed: int) -> list[Check]:
    checks = _cached("moyal", moyal_suite, seed)
    return [c for c in checks if c.id.split(".")[-1] in _MOYAL_IDS]


def degree_bound(seed: int) -> list[Check]:
    return [c for c in _cached("moyal", moyal_suite, seed) if c.id == "moyal.cone.degree-bound"]


def conjecture(seed: int) -> list[Check]:
    return q2_conjecture_probe(2)


def operator_constant(seed: int) -> list[Check]:
    return operator_constant_check()


def convergence(seed: int) -> list[Check]:
    wanted = ("convergence.ball", "convergence.monotone", "convergence.no-false-certificate")
    return [c for c in _cached("convergence", convergence_suite, seed) if c.id in wanted]


def norm_lemmas(seed: int) -> list[Check]:
    wanted = ("convergence.derivative-lemma", "convergence.vanishing-lemma")
    return [c for c in _cached("convergence", convergence_suite, seed) if c.id in wanted]


@dataclass(frozen=True)
class Criterion:
    name: str
    run: Callable[[int], list[Check]]
    limit_s: float | None = None


CRITERIA = (
    Criterion("jacobi", jacobi, 60),
    Criterion("darboux", darboux, 10),
    Criterion("reconstruction", reconstruction),
    Criterion("reduction", reduction),
    Criterion("moyal", moyal, 300),
    Criterion("degree-bound", degree_bound),
    Criterion("conjecture-probe", conjecture),
    Criterion("operator-constant", operator_constant),
    Criterion("convergence", convergence, 300),
    Criterion("norm-lemmas", norm_lemmas),
)


def evaluate(crit: Criterion, seed: int) -> tuple[bool, str]:
    start = time.perf_counter()
    checks = crit.run(seed)
    elapsed = time.perf_counter() - start
    failed = [c for c in checks if not c.ok]
    slow = crit.limit_s is not None and elapsed > crit.limit_s
    ok = bool(checks) and not failed and not slow
    detail = f"{len(checks) - len(failed)}/{len(checks)} checks, {elapsed:.2f}s"
    if crit.limit_s is not None:
        detail += f" (limit {crit.limit_s:g}s)"
    for c in failed:
        detail += f"\n    {c.id}: {c.witness.splitlines()[0] if c.witness else 'failed'}"
    return ok, f"{'PASS' if ok else 'FAIL'}  {crit.name:<18} {detail}"


@pytest.mark.parametrize("crit", CRITERIA, ids=[c.name for c in CRITERIA])
def test_criterion(crit, acceptance_log):
    ok, line = evaluate(crit, SEED)
    acceptance_log.append(line)
    assert ok, line


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(description="Run the acceptance criteria and print one line each.")
    ap.add_argument("--seed", type=int, default=SEED)
    args = ap.parse_args(argv)
    failures = 0
    for crit in CRITERIA:
        ok, line = evaluate(crit, args.seed)
        failures += not ok
        print(line, flush=True)
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
