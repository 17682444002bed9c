"""Obligation reports shared by the category checks, the completion and the CLI."""

from __future__ import annotations

import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Any, Optional

PASS, FAIL, UNKNOWN = "pass", "fail", "unknown"
STATUSES = (PASS, FAIL, UNKNOWN)


@dataclass
class Obligation:
    id: str
    kind: str
    status: str
    witness: Any = None

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"bad status {self.status!r}")

    def to_json(self) -> dict:
        out = {"id": self.id, "kind": self.kind, "status": self.status}
        if self.witness is not None:
            out["witness"] = self.witness
        return out


@dataclass
class Report:
    obligations: list = field(default_factory=list)
    timings: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)

    def add(self, id: str, kind: str, status: str, witness: Any = None) -> Obligation:
        ob = Obligation(id, kind, status, witness)
        self.obligations.append(ob)
        return ob

    def extend(self, other: "Report") -> None:
        self.obligations.extend(other.obligations)
        self.timings.update(other.timings)
        self.extra.update(other.extra)

    def of_kind(self, kind: str) -> list:
        return [o for o in self.obligations if o.kind == kind]

    def status_of(self, kind: Optional[str] = None) -> str:
        obs = self.obligations if kind is None else self.of_kind(kind)
        statuses = {o.status for o in obs}
        if FAIL in statuses:
            return FAIL
        if UNKNOWN in statuses:
            return UNKNOWN
        return PASS

    @property
    def status(self) -> str:
        return self.status_of()

    @property
    def counts(self) -> dict:
        out = {s: 0 for s in STATUSES}
        for o in self.obligations:
            out[o.status] += 1
        return out

    @property
    def exit_code(self) -> int:
        return {PASS: 0, FAIL: 1, UNKNOWN: 3}[self.status]

    @contextmanager
    def timed(self, label: str):
        start = time.perf_counter()
        try:
            yield
        finally:
            self.timings[label] = round(time.perf_counter() - start, 4)

    def to_json(self) -> dict:
        obs = sorted(self.obligations, key=lambda o: o.id)
        out = {"obligations": [o.to_json() for o in obs], "counts": self.counts,
               "status": self.status, "timings": dict(sorted(self.timings.items()))}
        out.update(self.extra)
        return out


__all__ = ["Obligation", "Report", "PASS", "FAIL", "UNKNOWN"]
