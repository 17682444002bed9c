"""Prefix text syntax for terms, as printed by :func:`rezk.terms.show`::

    x                              generator
    id(x)   comp(f, g, ...)   inv(h)
    restrict(t, {i:=0})
    glue(x, [(i=0) -> (y, f, g)])  gluei(...)  ext(a, [(i=0) -> b; (i=1) -> c])

Piece payloads are written as total terms over the ambient context and
restricted to each conjunct when the partial element is built.
"""

from __future__ import annotations

import re
from typing import Optional, Sequence

from . import cofib
from .cube import check_ctx, parse_substitution
from .presentation import Presentation
from .rewrite import Normalizer, system
from .terms import (Comp, ExtSet, GlueIsoFwd, GlueOb, IdHom, Inv, IsoTerm,
                    Restrict, Term, comp)


class TermSyntaxError(ValueError):
    def __init__(self, message: str, pos: Optional[int] = None):
        self.pos = pos
        super().__init__(message if pos is None else f"{message} (at offset {pos})")


_TOKEN = re.compile(
    r"\s*(->|:=|/\\|\\/|[A-Za-z_][A-Za-z0-9_']*|[01]|[()\[\]{},;=.∧∨⊤⊥∀])")
_KEYWORDS = {"id", "comp", "inv", "restrict", "glue", "gluei", "ext"}


def _tokenize(text: str) -> list:
    pos, out = 0, []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise TermSyntaxError(f"unexpected character {text[pos:].strip()[:1]!r}", pos)
        out.append((m.group(1), m.start(1)))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, text: str, pres: Presentation, nz: Normalizer):
        self.toks = _tokenize(text)
        self.k = 0
        self.pres = pres
        self.nz = nz

    def peek(self) -> Optional[str]:
        return self.toks[self.k][0] if self.k < len(self.toks) else None

    def pos(self) -> Optional[int]:
        return self.toks[self.k][1] if self.k < len(self.toks) else None

    def take(self, want: Optional[str] = None) -> str:
        tok = self.peek()
        if tok is None:
            raise TermSyntaxError(f"unexpected end of input, expected {want or 'a token'}")
        if want is not None and tok != want:
            raise TermSyntaxError(f"expected {want!r}, got {tok!r}", self.pos())
        self.k += 1
        return tok

    def raw_until(self, stops: set) -> str:
        """Source text of the tokens up to a stop token at bracket depth 0."""
        depth, parts = 0, []
        while True:
            tok = self.peek()
            if tok is None:
                raise TermSyntaxError(f"unexpected end of input, expected one of {sorted(stops)}")
            if depth == 0 and tok in stops:
                return " ".join(parts)
            if tok in "([{":
                depth += 1
            elif tok in ")]}":
                depth -= 1
            parts.append(tok)
            self.k += 1

    def term(self, ctx: tuple) -> Term:
        tok = self.peek()
        at = self.pos()
        if tok is None:
            raise TermSyntaxError("unexpected end of input, expected a term")
        if tok in _KEYWORDS and self.k + 1 < len(self.toks) and self.toks[self.k + 1][0] == "(":
            self.take()
            self.take("(")
            out = self.compound(tok, ctx)
            self.take(")")
            return out
        if not re.match(r"[A-Za-z_]", tok):
            raise TermSyntaxError(f"expected a term, got {tok!r}", at)
        self.take()
        if tok in self.pres.objects:
            return self.pres.ob(tok, ctx)
        if tok in self.pres.hom_table:
            return self.pres.hom(tok, ctx)
        raise TermSyntaxError(f"unknown generator {tok!r}", at)

    def compound(self, head: str, ctx: tuple) -> Term:
        if head == "id":
            return IdHom(self.term(ctx))
        if head == "inv":
            return Inv(self.term(ctx))
        if head == "comp":
            parts = [self.term(ctx)]
            while self.peek() == ",":
                self.take(",")
                parts.append(self.term(ctx))
            return comp(*parts)
        if head == "restrict":
            inner_at = self.k
            depth = 0
            # find the substitution first: it fixes the inner context
            j = self.k
            while j < len(self.toks):
                t = self.toks[j][0]
                if t in "([":
                    depth += 1
                elif t in ")]":
                    if depth == 0:
                        break
                    depth -= 1
                elif t == "," and depth == 0:
                    break
                j += 1
            self.k = j
            self.take(",")
            self.take("{")
            raw = self.raw_until({"}"})
            self.take("}")
            end = self.k
            try:
                f = parse_substitution("{" + raw.replace(" ", "") + "}", dom=ctx)
            except ValueError as e:
                raise TermSyntaxError(str(e), self.toks[j][1]) from None
            missing = [v for v in f.images if isinstance(v, str) and v not in ctx]
            if missing:
                raise TermSyntaxError(f"names {missing} not in context {ctx}")
            self.k = inner_at
            inner = self.term(f.cod)
            if self.k != j:
                raise TermSyntaxError("malformed restrict", self.pos())
            self.k = end
            return Restrict(inner, f)
        base = self.term(ctx)
        self.take(",")
        self.take("[")
        entries = []
        while self.peek() != "]":
            at = self.pos()
            raw = self.raw_until({"->"})
            self.take("->")
            try:
                phi = cofib.parse_cof(raw)
            except ValueError as e:
                raise TermSyntaxError(str(e), at) from None
            extra = cofib.free_vars(phi) - set(ctx)
            if extra:
                raise TermSyntaxError(f"names {sorted(extra)} not in context {ctx}", at)
            if head == "ext":
                payload = self.term(ctx)
            else:
                self.take("(")
                y = self.term(ctx)
                self.take(",")
                fwd = self.term(ctx)
                self.take(",")
                inv = self.term(ctx)
                self.take(")")
                payload = (y, IsoTerm(fwd, inv))
            entries.append((phi, payload))
            if self.peek() == ";":
                self.take(";")
            elif self.peek() != "]":
                raise TermSyntaxError(f"expected ';' or ']', got {self.peek()!r}", self.pos())
        self.take("]")
        p = system(ctx, entries, self.nz)
        node = {"glue": GlueOb, "gluei": GlueIsoFwd, "ext": ExtSet}[head]
        return node(base, p)


def parse_term(text: str, pres: Presentation, ctx: Sequence[str] = (),
               nz: Optional[Normalizer] = None) -> Term:
    """Parse a term over ``ctx`` against the generators of ``pres``."""
    p = _Parser(text, pres, nz or Normalizer(pres))
    t = p.term(check_ctx(ctx))
    if p.peek() is not None:
        raise TermSyntaxError(f"trailing input {p.peek()!r}", p.pos())
    return t


__all__ = ["parse_term", "TermSyntaxError"]
