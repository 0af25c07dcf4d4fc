"""Check records and suite reports shared by the verification modules and the CLI."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Iterable

PASS, FAIL, SKIP = "pass", "fail", "skip"


@dataclass(frozen=True)
class Check:
    id: str
    model: str
    statement: str
    status: str
    witness: str = ""

    @property
    def ok(self) -> bool:
        return self.status != FAIL


def check(id: str, model: str, statement: str, passed: bool, witness: str = "", info: str = "") -> Check:
    """Build a record; the witness is only kept on failure unless ``info`` is given."""
    return Check(id, model, statement, PASS if passed else FAIL, witness if not passed else info)


def all_passed(checks: Iterable[Check]) -> bool:
    return all(c.ok for c in checks)


@dataclass
class SuiteReport:
    suite: str
    seed: int
    version: str
    checks: list[Check] = field(default_factory=list)

    @property
    def counts(self) -> dict[str, int]:
        out = {PASS: 0, FAIL: 0, SKIP: 0}
        for c in self.checks:
            out[c.status] += 1
        return out

    @property
    def exit_code(self) -> int:
        return 0 if self.counts[FAIL] == 0 else 1

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "seed": self.seed,
            "version": self.version,
            "summary": self.counts,
            "checks": [asdict(c) for c in self.checks],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    def to_text(self) -> str:
        lines = [f"suite {self.suite}  seed={self.seed}  version={self.version}"]
        for c in self.checks:
            line = f"[{c.status.upper():4}] {c.id:<44} {c.model:<10} {c.statement}"
            lines.append(line)
            if c.witness:
                for w in c.witness.splitlines():
                    lines.append(f"        {w}")
        n = self.counts
        lines.append(f"{n[PASS]} passed, {n[FAIL]} failed, {n[SKIP]} skipped")
        return "\n".join(lines) + "\n"
