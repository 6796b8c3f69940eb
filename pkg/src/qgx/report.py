"""Uniform pass/fail records shared by every verification routine."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable


@dataclass(frozen=True)
class CheckResult:
    equation: str
    passed: bool
    degree: int | None = None
    witness: str | None = None
    note: str | None = None

    @property
    def status(self) -> str:
        return "pass" if self.passed else "fail"

    def to_obj(self) -> dict:
        obj = {"equation": self.equation, "status": self.status, "degree": self.degree, "witness": self.witness}
        if self.note:
            obj["note"] = self.note
        return obj

    def to_text(self) -> str:
        deg = "" if self.degree is None else f" [degree {self.degree}]"
        line = f"{self.status.upper():4} {self.equation}{deg}"
        if self.witness is not None:
            line += f"  witness: {self.witness}"
        if self.note:
            line += f"  ({self.note})"
        return line


def all_passed(results: Iterable[CheckResult]) -> bool:
    return all(r.passed for r in results)


def to_json(results: Iterable[CheckResult]) -> str:
    return json.dumps([r.to_obj() for r in results], indent=1)


def to_text(results: Iterable[CheckResult]) -> str:
    return "\n".join(r.to_text() for r in results)
