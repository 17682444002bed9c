"""Finite presentations of sets and categories.

Text format::

    theory CAT
    [objects]
    x y
    [homs]
    f : x -> y
    g : y -> x
    [rules]
    g.f -> id_x
    f.g -> id

Words are written in composition order (``g.f`` applies ``f`` first).  A SET
presentation lists its generators under ``[objects]`` or ``[elements]`` and
has no homs or rules.  ``#`` starts a comment.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .terms import Gen, Term, compose_word, gen, hom_sort

THEORIES = ("SET", "CAT")
_IDENT = re.compile(r"^[A-Za-z_][A-Za-z0-9_']*$")


class PresentationError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None, source: str = "<string>"):
        self.line = line
        self.source = source
        self.message = message
        where = f"{source}:{line}: " if line is not None else f"{source}: "
        super().__init__(where + message)


@dataclass(frozen=True)
class HomGen:
    name: str
    src: str
    dst: str


@dataclass(frozen=True)
class Rule:
    """Oriented rewrite ``lhs -> rhs`` of hom words; an empty rhs is the identity."""

    lhs: tuple
    rhs: tuple
    src: str
    dst: str

    def __str__(self) -> str:
        rhs = ".".join(self.rhs) if self.rhs else f"id_{self.src}"
        return f"{'.'.join(self.lhs)} -> {rhs}"


@dataclass(frozen=True)
class Presentation:
    theory: str
    objects: tuple = ()
    homs: tuple = ()
    rules: tuple = ()
    name: str = ""

    def __post_init__(self):
        if self.theory not in THEORIES:
            raise PresentationError(f"unknown theory {self.theory!r}")
        names = list(self.objects) + [h.name for h in self.homs]
        seen = set()
        for n in names:
            if not _IDENT.match(n) or n.startswith("id_") or n == "id":
                raise PresentationError(f"invalid generator name {n!r}")
            if n in seen:
                raise PresentationError(f"duplicate generator {n!r}")
            seen.add(n)
        if self.theory == "SET" and (self.homs or self.rules):
            raise PresentationError("SET presentations have no homs or rules")
        obs = set(self.objects)
        for h in self.homs:
            if h.src not in obs or h.dst not in obs:
                raise PresentationError(f"hom {h.name} has unknown endpoint")
        for r in self.rules:
            self._check_rule(r)

    def _check_rule(self, r: Rule) -> None:
        if not r.lhs:
            raise PresentationError(f"rule {r} has an empty left side")
        for side in (r.lhs, r.rhs):
            if not side:
                continue
            src, dst = self._word_ends(side, str(r))
            if (src, dst) != (r.src, r.dst):
                raise PresentationError(f"rule {r} sides have different endpoints")
        if not r.rhs and r.src != r.dst:
            raise PresentationError(f"rule {r}: identity on the right needs equal endpoints")

    def _word_ends(self, word: Sequence[str], what: str) -> tuple:
        table = self.hom_table
        for n in word:
            if n not in table:
                raise PresentationError(f"{what}: unknown hom {n!r}")
        for outer, inner in zip(word, word[1:]):
            if table[outer].src != table[inner].dst:
                raise PresentationError(f"{what}: {outer}.{inner} is not composable")
        return table[word[-1]].src, table[word[0]].dst

    @property
    def hom_table(self) -> dict:
        return {h.name: h for h in self.homs}

    @property
    def generators(self) -> tuple:
        return tuple(self.objects)

    @property
    def base_sort(self) -> str:
        return "ob" if self.theory == "CAT" else "elt"

    def ob(self, name: str, ctx: Sequence[str] = ()) -> Gen:
        if name not in self.objects:
            raise KeyError(name)
        return gen(name, self.base_sort, ctx)

    def hom(self, name: str, ctx: Sequence[str] = ()) -> Gen:
        h = self.hom_table[name]
        return gen(name, hom_sort(h.src, h.dst), ctx)

    def word(self, names: Sequence[str], ctx: Sequence[str] = (),
             src: Optional[str] = None) -> Term:
        """Composite of a word of hom generators (identity on ``src`` if empty)."""
        if not names:
            return compose_word((), self.ob(src, ctx))
        return compose_word([self.hom(n, ctx) for n in names])

    def to_text(self) -> str:
        lines = [f"theory {self.theory}", "[objects]", " ".join(self.objects)]
        if self.homs:
            lines.append("[homs]")
            lines += [f"{h.name} : {h.src} -> {h.dst}" for h in self.homs]
        if self.rules:
            lines.append("[rules]")
            lines += [str(r) for r in self.rules]
        return "\n".join(lines) + "\n"


def _rule_from_text(lhs: str, rhs: str, table: dict, line: int, source: str) -> Rule:
    lw = tuple(p.strip() for p in lhs.split("."))
    if any(not p for p in lw):
        raise PresentationError(f"malformed word {lhs!r}", line, source)
    for n in lw:
        if n not in table:
            raise PresentationError(f"unknown hom {n!r}", line, source)
    src, dst = table[lw[-1]].src, table[lw[0]].dst
    rhs = rhs.strip()
    if rhs == "id" or rhs.startswith("id_"):
        if rhs != "id" and rhs[3:] != src:
            raise PresentationError(f"{rhs} does not match source {src}", line, source)
        rw: tuple = ()
    else:
        rw = tuple(p.strip() for p in rhs.split("."))
        if any(not p for p in rw):
            raise PresentationError(f"malformed word {rhs!r}", line, source)
    return Rule(lw, rw, src, dst)


def parse_presentation(text: str, source: str = "<string>", name: str = "") -> Presentation:
    theory = None
    section = None
    objects: list = []
    homs: list = []
    raw_rules: list = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("theory"):
            parts = line.split()
            if len(parts) != 2 or parts[1].upper() not in THEORIES:
                raise PresentationError(f"expected 'theory SET' or 'theory CAT', got {line!r}",
                                        lineno, source)
            theory = parts[1].upper()
            continue
        m = re.fullmatch(r"\[(\w+)\]", line)
        if m:
            section = m.group(1).lower()
            if section not in ("objects", "elements", "homs", "rules"):
                raise PresentationError(f"unknown section [{section}]", lineno, source)
            continue
        if section in ("objects", "elements"):
            for n in re.split(r"[\s,]+", line):
                if not _IDENT.match(n):
                    raise PresentationError(f"invalid name {n!r}", lineno, source)
                objects.append(n)
        elif section == "homs":
            m = re.fullmatch(r"([A-Za-z_][\w']*)\s*:\s*([A-Za-z_][\w']*)\s*->\s*([A-Za-z_][\w']*)",
                             line)
            if not m:
                raise PresentationError(f"expected 'f : x -> y', got {line!r}", lineno, source)
            homs.append((HomGen(*m.groups()), lineno))
        elif section == "rules":
            if "->" not in line:
                raise PresentationError(f"expected 'word -> word', got {line!r}", lineno, source)
            lhs, rhs = line.split("->", 1)
            raw_rules.append((lhs, rhs, lineno))
        else:
            raise PresentationError(f"content outside a section: {line!r}", lineno, source)
    if theory is None:
        raise PresentationError("missing 'theory' line", None, source)
    table = {h.name: h for h, _ in homs}
    for h, lineno in homs:
        if h.src not in objects or h.dst not in objects:
            raise PresentationError(f"hom {h.name} has unknown endpoint", lineno, source)
    rules = []
    for lhs, rhs, lineno in raw_rules:
        rule = _rule_from_text(lhs, rhs, table, lineno, source)
        try:
            Presentation(theory, tuple(objects), tuple(table.values()), (rule,))
        except PresentationError as e:
            raise PresentationError(e.message, lineno, source) from None
        rules.append(rule)
    try:
        return Presentation(theory, tuple(objects), tuple(h for h, _ in homs), tuple(rules),
                            name)
    except PresentationError as e:
        raise PresentationError(e.message, None, source) from None


def load_presentation(path: str | Path) -> Presentation:
    path = Path(path)
    return parse_presentation(path.read_text(), str(path), path.stem)


# ---------------------------------------------------------------------------
# small examples


def set_presentation(elements: Iterable[str]) -> Presentation:
    return Presentation("SET", tuple(elements), name="set")


def discrete(objects: Iterable[str] = ("x", "y")) -> Presentation:
    return Presentation("CAT", tuple(objects), name="discrete")


def empty_category() -> Presentation:
    return Presentation("CAT", name="empty")


def walking_arrow() -> Presentation:
    return Presentation("CAT", ("x", "y"), (HomGen("f", "x", "y"),), name="walking_arrow")


def walking_iso() -> Presentation:
    return Presentation(
        "CAT", ("x", "y"), (HomGen("f", "x", "y"), HomGen("g", "y", "x")),
        (Rule(("g", "f"), (), "x", "x"), Rule(("f", "g"), (), "y", "y")),
        name="walking_iso")


def walking_loop() -> Presentation:
    """One object with a loop ``l`` and no relations (the free monoid on ``l``)."""
    return Presentation("CAT", ("x",), (HomGen("l", "x", "x"),), name="loop")


def walking_idempotent() -> Presentation:
    return Presentation("CAT", ("x",), (HomGen("e", "x", "x"),),
                        (Rule(("e", "e"), ("e",), "x", "x"),), name="idempotent")


BUILTIN = {
    "walking_iso": walking_iso,
    "walking_arrow": walking_arrow,
    "discrete": discrete,
    "empty": empty_category,
    "loop": walking_loop,
    "idempotent": walking_idempotent,
}
