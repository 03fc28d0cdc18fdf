from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

PASS = "pass"
FAIL = "fail"
SIGN_DISCREPANCY = "sign-discrepancy"


@dataclass
class VerificationReport:
    scenario: str
    params: dict[str, Any]
    verdict: str
    witness: dict[str, Any] | None = None
    elapsed_ms: float = 0.0
    term_counts: dict[str, int] = field(default_factory=dict)
    oracle: dict[str, Any] | None = None

    def __post_init__(self) -> None:
        if self.verdict != PASS and self.witness is None:
            raise ValueError("a failing report must carry a witness term")

    @property
    def passed(self) -> bool:
        return self.verdict == PASS

    def to_dict(self, timing: bool = True) -> dict[str, Any]:
        return {
            "scenario": self.scenario,
            "params": self.params,
            "verdict": self.verdict,
            "witness": self.witness,
            "elapsed_ms": round(self.elapsed_ms, 3) if timing else 0,
            "term_counts": self.term_counts,
            "oracle": self.oracle,
        }

    def to_json(self, timing: bool = True) -> str:
        return json.dumps(self.to_dict(timing), indent=2, ensure_ascii=False)

    def summary(self) -> str:
        p = self.params
        sizes = " ".join(f"{k}={p[k]}" for k in ("n", "m", "d", "K", "seed") if k in p)
        line = f"{self.scenario:<16} {sizes:<28} {self.verdict}"
        if self.witness:
            line += f"  witness: {self.witness}"
        return line


def dump_reports(reports: list[VerificationReport], timing: bool = True) -> str:
    ordered = sorted(reports, key=lambda r: (r.scenario, r.params.get("seed", 0), json.dumps(r.params, sort_keys=True)))
    return json.dumps([r.to_dict(timing) for r in ordered], indent=2, ensure_ascii=False) + "\n"
