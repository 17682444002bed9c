"""Boundary certificates: lists of checked normal-form equations that can be
re-verified from scratch with any normalizer."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional

from .rewrite import Normalizer
from .terms import IsoTerm, Term, show


class _Marker:
    """Proof-irrelevant witnesses (unit elements, reflexivity proofs)."""

    def __init__(self, name: str):
        self.name = name

    def __repr__(self) -> str:
        return self.name

    def __reduce__(self):
        return (_marker, (self.name,))


def _marker(name: str) -> "_Marker":
    return {"UNIT": UNIT, "REFL": REFL}[name]


UNIT = _Marker("UNIT")
REFL = _Marker("REFL")


def components(x: Any) -> tuple:
    """The terms inside a value (term, iso, tuple of those, or a marker)."""
    if isinstance(x, Term):
        return (x,)
    if isinstance(x, IsoTerm):
        return (x.fwd, x.inv)
    if isinstance(x, tuple):
        return tuple(t for part in x for t in components(part))
    if isinstance(x, _Marker):
        return ()
    raise TypeError(f"not a term-valued object: {x!r}")


@dataclass(frozen=True)
class CheckEntry:
    description: str
    where: str
    lhs: Term
    rhs: Term
    lhs_nf: Term
    rhs_nf: Term
    passed: bool

    def to_json(self) -> dict:
        return {"description": self.description, "where": self.where,
                "lhs": show(self.lhs_nf), "rhs": show(self.rhs_nf), "pass": self.passed}


@dataclass
class Certificate:
    entries: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures and all(e.passed for e in self.entries)

    def check(self, description: str, where: Any, lhs: Term, rhs: Term,
              nz: Normalizer) -> bool:
        a, b = nz.nf(lhs), nz.nf(rhs)
        entry = CheckEntry(description, str(where), lhs, rhs, a, b, a == b)
        self.entries.append(entry)
        return entry.passed

    def check_values(self, description: str, where: Any, lhs: Any, rhs: Any,
                     nz: Normalizer) -> bool:
        """Componentwise equation between term-valued objects of the same shape."""
        ls, rs = components(lhs), components(rhs)
        if len(ls) != len(rs):
            self.fail(description, where, f"shape mismatch: {lhs!r} vs {rhs!r}")
            return False
        ok = True
        for k, (a, b) in enumerate(zip(ls, rs)):
            label = description if len(ls) == 1 else f"{description} [{k}]"
            ok = self.check(label, where, a, b, nz) and ok
        return ok

    def fail(self, description: str, where: Any, reason: str) -> None:
        self.failures.append({"description": description, "where": str(where),
                              "reason": reason})

    def note(self, text: str) -> None:
        if text not in self.notes:
            self.notes.append(text)

    def extend(self, other: "Certificate", prefix: str = "") -> None:
        for e in other.entries:
            self.entries.append(CheckEntry(prefix + e.description, e.where, e.lhs, e.rhs,
                                           e.lhs_nf, e.rhs_nf, e.passed))
        for f in other.failures:
            self.failures.append({**f, "description": prefix + f["description"]})
        for n in other.notes:
            self.note(n)

    def recheck(self, nz: Optional[Normalizer] = None) -> bool:
        """Recompute every entry; True iff each stored verdict is reproduced
        and the stored normal forms match the recomputed ones."""
        nz = nz or Normalizer()
        for e in self.entries:
            a, b = nz.nf(e.lhs), nz.nf(e.rhs)
            if (a == b) != e.passed or a != e.lhs_nf or b != e.rhs_nf:
                return False
        return True

    def first_failure(self) -> Optional[dict]:
        for e in self.entries:
            if not e.passed:
                return e.to_json()
        return self.failures[0] if self.failures else None

    def to_json(self) -> dict:
        return {"pass": self.passed, "entries": [e.to_json() for e in self.entries],
                "failures": list(self.failures), "notes": list(self.notes)}


__all__ = ["Certificate", "CheckEntry", "UNIT", "REFL", "components"]
