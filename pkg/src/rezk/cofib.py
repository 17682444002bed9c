"""Cofibrations: formulas over dimension names denoting sieves.

Everything here is judged against one semantics: :func:`decided` tells
whether the identity map belongs to the sieve of a formula.  Entailment, DNF
and forall-elimination are algorithms; :func:`oracle_entails` is a brute-force
check over critical substitutions that shares none of their code.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Optional, Sequence, Union

from .cube import (CubeError, IExpr, Substitution, check_ctx,
                   critical_substitutions, expr_key, fresh_name, is_const)


class CofError(ValueError):
    pass


@dataclass(frozen=True)
class Eq:
    lhs: IExpr
    rhs: IExpr


@dataclass(frozen=True)
class Top:
    pass


@dataclass(frozen=True)
class Bot:
    pass


@dataclass(frozen=True)
class And:
    left: "Cofibration"
    right: "Cofibration"


@dataclass(frozen=True)
class Or:
    left: "Cofibration"
    right: "Cofibration"


@dataclass(frozen=True)
class Forall:
    binder: str
    body: "Cofibration"


Cofibration = Union[Eq, Top, Bot, And, Or, Forall]

TOP = Top()
BOT = Bot()


def conj(*parts: Cofibration) -> Cofibration:
    out: Cofibration = TOP
    for p in parts:
        out = p if isinstance(out, Top) else And(out, p)
    return out


def disj(*parts: Cofibration) -> Cofibration:
    out: Cofibration = BOT
    for p in parts:
        out = p if isinstance(out, Bot) else Or(out, p)
    return out


def free_vars(a: Cofibration) -> frozenset:
    match a:
        case Eq(l, r):
            return frozenset(e for e in (l, r) if not is_const(e))
        case And(l, r) | Or(l, r):
            return free_vars(l) | free_vars(r)
        case Forall(b, body):
            return free_vars(body) - {b}
    return frozenset()


def size(a: Cofibration) -> int:
    match a:
        case And(l, r) | Or(l, r):
            return 1 + size(l) + size(r)
        case Forall(_, body):
            return 1 + size(body)
    return 1


def infer_ctx(*formulas: Cofibration) -> tuple:
    names: set = set()
    for a in formulas:
        names |= free_vars(a)
    return tuple(sorted(names))


# ---------------------------------------------------------------------------
# substitution and sieve membership


@lru_cache(maxsize=1 << 16)
def subst_cof(a: Cofibration, f: Substitution) -> Cofibration:
    """``a[f]`` for ``a`` over ``f.cod``; the result lives over ``f.dom``."""
    match a:
        case Eq(l, r):
            try:
                return Eq(f.apply(l), f.apply(r))
            except CubeError as err:
                raise CofError(str(err)) from None
        case And(l, r):
            return And(subst_cof(l, f), subst_cof(r, f))
        case Or(l, r):
            return Or(subst_cof(l, f), subst_cof(r, f))
        case Forall(b, body):
            b2 = fresh_name(b, f.dom + f.cod)
            # the body lives over cod+b; a binder shadowing a cod name hides it
            keep = [(v, e) for v, e in f.items() if v != b]
            g = Substitution(f.dom + (b2,), tuple(v for v, _ in keep) + (b,),
                             tuple(e for _, e in keep) + (b2,))
            return Forall(b2, subst_cof(body, g))
    return a


def decided(a: Cofibration) -> bool:
    """Whether the identity substitution lies in the sieve of ``a``."""
    match a:
        case Eq(l, r):
            return l == r and type(l) is type(r)
        case Top():
            return True
        case Bot():
            return False
        case And(l, r):
            return decided(l) and decided(r)
        case Or(l, r):
            return decided(l) or decided(r)
        case Forall(_, body):
            # the binder is a variable distinct from every other name
            return decided(body)
    raise CofError(f"not a cofibration: {a!r}")


# ---------------------------------------------------------------------------
# forall elimination



def forall_elim(binder: str, body: Cofibration) -> Cofibration:
    """A binder-free formula with the same sieve as ``forall binder. body``."""
    body = eliminate_foralls(body)
    match body:
        case Eq(l, r):
            if l == binder and r == binder:
                return TOP
            if binder in (l, r):
                return BOT
            return body
        case And(l, r):
            return _and(forall_elim(binder, l), forall_elim(binder, r))
        case Or(l, r):
            return _or(forall_elim(binder, l), forall_elim(binder, r))
    return body


def _and(a: Cofibration, b: Cofibration) -> Cofibration:
    if isinstance(a, Bot) or isinstance(b, Bot):
        return BOT
    if isinstance(a, Top):
        return b
    if isinstance(b, Top):
        return a
    return And(a, b)


def _or(a: Cofibration, b: Cofibration) -> Cofibration:
    if isinstance(a, Top) or isinstance(b, Top):
        return TOP
    if isinstance(a, Bot):
        return b
    if isinstance(b, Bot):
        return a
    return Or(a, b)


def eliminate_foralls(a: Cofibration) -> Cofibration:
    match a:
        case And(l, r):
            return And(eliminate_foralls(l), eliminate_foralls(r))
        case Or(l, r):
            return Or(eliminate_foralls(l), eliminate_foralls(r))
        case Forall(b, body):
            return forall_elim(b, body)
    return a


# ---------------------------------------------------------------------------
# conjunct systems and DNF


@dataclass(frozen=True)
class ConjunctSystem:
    """A satisfiable conjunction of interval equations in canonical form:
    each equation is ``(name, value)`` where ``value`` is an endpoint or the
    first name of the name's class (in context order)."""

    ctx: tuple
    equations: tuple

    def formula(self) -> Cofibration:
        return conj(*(Eq(v, e) for v, e in self.equations))

    def holds_under(self, f: Substitution) -> bool:
        return all(f.apply(v) == f.apply(e) and type(f.apply(v)) is type(f.apply(e))
                   for v, e in self.equations)

    def __str__(self) -> str:
        if not self.equations:
            return "T"
        return " /\\ ".join(f"({v}={e})" for v, e in self.equations)


def _find(parent: dict, x):
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


def _classes(ctx: tuple, pairs: Iterable[tuple]) -> Optional[dict]:
    """Union-find over names and endpoints; maps every ctx name to its
    representative value, or None when 0 and 1 are identified."""
    parent: dict = {0: 0, 1: 1}
    for v in ctx:
        parent[v] = v
    for a, b in pairs:
        for e in (a, b):
            if e not in parent:
                raise CofError(f"name {e!r} not in context {ctx}")
        ra, rb = _find(parent, a), _find(parent, b)
        if ra == rb:
            continue
        # endpoints and earlier names win as representatives
        if expr_key(rb, ctx) < expr_key(ra, ctx):
            ra, rb = rb, ra
        parent[rb] = ra
    if _find(parent, 0) == _find(parent, 1):
        return None
    return {v: _find(parent, v) for v in ctx}


def make_conjunct(ctx: Sequence[str], pairs: Iterable[tuple]) -> Optional[ConjunctSystem]:
    ctx = tuple(ctx)
    reps = _classes(ctx, pairs)
    if reps is None:
        return None
    eqs = tuple((v, reps[v]) for v in ctx if reps[v] != v)
    return ConjunctSystem(ctx, eqs)


@lru_cache(maxsize=1 << 16)
def quotient(c: ConjunctSystem) -> Optional[Substitution]:
    """Most general substitution making every equation of ``c`` hold."""
    reps = _classes(c.ctx, c.equations)
    if reps is None:
        return None
    dom = tuple(v for v in c.ctx if reps[v] == v)
    return Substitution(dom, c.ctx, tuple(reps[v] for v in c.ctx))


def conjunct_entails(c1: ConjunctSystem, c2: ConjunctSystem) -> bool:
    return c2.holds_under(quotient(c1))


def _raw_dnf(a: Cofibration) -> list:
    match a:
        case Eq(l, r):
            return [((l, r),)]
        case Top():
            return [()]
        case Bot():
            return []
        case And(l, r):
            return [x + y for x in _raw_dnf(l) for y in _raw_dnf(r)]
        case Or(l, r):
            return _raw_dnf(l) + _raw_dnf(r)
    raise CofError(f"unexpected node in DNF: {a!r}")


def _conj_key(c: ConjunctSystem) -> tuple:
    return (len(c.equations),
            tuple((c.ctx.index(v), expr_key(e, c.ctx)) for v, e in c.equations))


def canonical_conjuncts(ctx: tuple, systems: Iterable[ConjunctSystem]) -> tuple:
    uniq = sorted(set(systems), key=_conj_key)
    kept = [c for c in uniq
            if not any(d != c and conjunct_entails(c, d) for d in uniq)]
    return tuple(kept)


@lru_cache(maxsize=1 << 16)
def _dnf(a: Cofibration, ctx: tuple) -> tuple:
    systems = []
    for pairs in _raw_dnf(eliminate_foralls(a)):
        c = make_conjunct(ctx, pairs)
        if c is not None:
            systems.append(c)
    return canonical_conjuncts(ctx, systems)


def dnf(a: Cofibration, ctx: Optional[Sequence[str]] = None) -> tuple:
    """Canonical DNF: forall eliminated, unsatisfiable and subsumed conjuncts
    dropped, conjuncts sorted.  Equal sieves give equal output."""
    ctx = infer_ctx(a) if ctx is None else check_ctx(ctx)
    missing = free_vars(a) - set(ctx)
    if missing:
        raise CofError(f"free names {sorted(missing)} not in context {ctx}")
    return _dnf(a, ctx)


def from_conjuncts(conjuncts: Iterable[ConjunctSystem]) -> Cofibration:
    return disj(*(c.formula() for c in conjuncts))


def canonical(a: Cofibration, ctx: Optional[Sequence[str]] = None) -> Cofibration:
    return from_conjuncts(dnf(a, ctx))


def is_decided_dnf(conjuncts: Sequence[ConjunctSystem]) -> bool:
    return len(conjuncts) == 1 and not conjuncts[0].equations


# ---------------------------------------------------------------------------
# entailment


def _ctx_for(a: Cofibration, b: Cofibration, ctx) -> tuple:
    if ctx is None:
        return infer_ctx(a, b)
    ctx = check_ctx(ctx)
    missing = (free_vars(a) | free_vars(b)) - set(ctx)
    if missing:
        raise CofError(f"free names {sorted(missing)} not in context {ctx}")
    return ctx


def entails(a: Cofibration, b: Cofibration, ctx: Optional[Sequence[str]] = None) -> bool:
    """``[a]`` is contained in ``[b]``: ``b`` is decided at the quotient of
    every conjunct of ``a``."""
    ctx = _ctx_for(a, b, ctx)
    return all(decided(subst_cof(b, quotient(c))) for c in _dnf(a, ctx))


def entailment_witness(a: Cofibration, b: Cofibration,
                       ctx: Optional[Sequence[str]] = None) -> Optional[Substitution]:
    """A quotient substitution in ``[a]`` but not in ``[b]``, if any."""
    ctx = _ctx_for(a, b, ctx)
    for c in _dnf(a, ctx):
        q = quotient(c)
        if not decided(subst_cof(b, q)):
            return q
    return None


def equivalent(a: Cofibration, b: Cofibration, ctx: Optional[Sequence[str]] = None) -> bool:
    return entails(a, b, ctx) and entails(b, a, ctx)


def oracle_entails(a: Cofibration, b: Cofibration,
                   ctx: Optional[Sequence[str]] = None) -> bool:
    """Brute force: every critical substitution deciding ``a`` decides ``b``.
    For testing only."""
    ctx = _ctx_for(a, b, ctx)
    for q in critical_substitutions(ctx):
        if decided(subst_cof(a, q)) and not decided(subst_cof(b, q)):
            return False
    return True


def oracle_sieve(a: Cofibration, ctx: Sequence[str]) -> frozenset:
    """Critical substitutions (by position) at which ``a`` is decided."""
    return frozenset(k for k, q in enumerate(critical_substitutions(tuple(ctx)))
                     if decided(subst_cof(a, q)))


# ---------------------------------------------------------------------------
# text syntax:  (i=0)  (i=j)  /\  \/  T  F  forall i. ...

_TOKEN = re.compile(r"\s*(forall|∀|/\\|\\/|∧|∨|⊤|⊥|[A-Za-z_][A-Za-z0-9_']*|[01]|[().=])")


def _tokenize(text: str) -> list:
    pos, out = 0, []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise CofError(f"unexpected character at {pos}: {text[pos:pos + 10]!r}")
        out.append((m.group(1), m.start(1)))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.k = 0

    def peek(self, offset: int = 0) -> Optional[str]:
        j = self.k + offset
        return self.toks[j][0] if j < len(self.toks) else None

    def take(self, expected: Optional[str] = None) -> str:
        tok = self.peek()
        if tok is None or (expected is not None and tok != expected):
            where = self.toks[self.k][1] if self.k < len(self.toks) else len(self.text)
            raise CofError(f"expected {expected or 'token'} at {where} in {self.text!r}")
        self.k += 1
        return tok

    def parse(self) -> Cofibration:
        a = self.disj()
        if self.peek() is not None:
            raise CofError(f"trailing input at {self.toks[self.k][1]} in {self.text!r}")
        return a

    def disj(self) -> Cofibration:
        a = self.conj()
        while self.peek() in ("\\/", "∨"):
            self.take()
            a = Or(a, self.conj())
        return a

    def conj(self) -> Cofibration:
        a = self.unary()
        while self.peek() in ("/\\", "∧"):
            self.take()
            a = And(a, self.unary())
        return a

    def expr(self) -> IExpr:
        tok = self.take()
        if tok in ("0", "1"):
            return int(tok)
        if not re.match(r"^[A-Za-z_]", tok) or tok in ("T", "F", "forall"):
            raise CofError(f"bad interval expression {tok!r} in {self.text!r}")
        return tok

    def unary(self) -> Cofibration:
        tok = self.peek()
        if tok in ("forall", "∀"):
            self.take()
            name = self.expr()
            if is_const(name):
                raise CofError("forall needs a name")
            self.take(".")
            return Forall(name, self.disj())
        if tok in ("T", "⊤"):
            self.take()
            return TOP
        if tok in ("F", "⊥"):
            self.take()
            return BOT
        if tok == "(":
            if self.peek(2) == "=":
                self.take("(")
                lhs = self.expr()
                self.take("=")
                rhs = self.expr()
                self.take(")")
                return Eq(lhs, rhs)
            self.take("(")
            a = self.disj()
            self.take(")")
            return a
        raise CofError(f"unexpected {tok!r} in {self.text!r}")


def parse_cof(text: str) -> Cofibration:
    return _Parser(text).parse()


def show_cof(a: Cofibration) -> str:
    match a:
        case Eq(l, r):
            return f"({l}={r})"
        case Top():
            return "T"
        case Bot():
            return "F"
        case And(l, r):
            return f"{_wrap(l, (Or, Forall))} /\\ {_wrap(r, (Or, Forall))}"
        case Or(l, r):
            return f"{_wrap(l, (Forall,))} \\/ {_wrap(r, (Forall,))}"
        case Forall(b, body):
            return f"forall {b}. {show_cof(body)}"
    raise CofError(f"not a cofibration: {a!r}")


def _wrap(a: Cofibration, kinds: tuple) -> str:
    s = show_cof(a)
    return f"({s})" if isinstance(a, kinds) else s


def show_dnf(conjuncts: Sequence[ConjunctSystem]) -> str:
    if not conjuncts:
        return "F"
    return " \\/ ".join(f"({c})" if len(c.equations) > 1 else str(c) for c in conjuncts)


def restrict_conjuncts(conjuncts: Sequence[ConjunctSystem], f: Substitution) -> tuple:
    """Canonical DNF of ``(\\/ conjuncts)[f]`` over ``f.dom``."""
    return _dnf(subst_cof(from_conjuncts(conjuncts), f), f.dom)


__all__ = [
    "Eq", "Top", "Bot", "And", "Or", "Forall", "Cofibration", "TOP", "BOT",
    "ConjunctSystem", "CofError", "conj", "disj", "free_vars", "size",
    "subst_cof", "decided", "forall_elim", "eliminate_foralls", "dnf",
    "quotient", "entails", "oracle_entails", "equivalent", "canonical",
    "from_conjuncts", "make_conjunct", "conjunct_entails", "parse_cof",
    "show_cof", "show_dnf", "entailment_witness", "oracle_sieve",
    "restrict_conjuncts", "is_decided_dnf",
]
