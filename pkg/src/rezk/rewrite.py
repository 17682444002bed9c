"""Normalization of terms.

Two engines compute the same normal forms:

* :class:`Normalizer` is a big-step evaluator that carries a pending
  substitution down the term and reduces hom words on a stack;
* :class:`SmallStep` applies one rewrite rule at a time under a
  chosen strategy and is used to test that normal forms do not depend on the
  order of rewriting.

The rules are: restriction fusion and pushing (through operations and into
glue/ext payloads), boundary collapse of nodes whose cofibration is decided,
associativity and unit laws, the inverse calculus with cancellation of
adjacent glue isomorphisms, and the oriented relations of a presentation.
"""

from __future__ import annotations

import os
import random
from dataclasses import dataclass
from typing import Any, Iterable, Optional, Sequence

from . import cofib
from .cofib import Cofibration, ConjunctSystem
from .cube import CubeError, Substitution, compose, factor_through
from .presentation import Presentation, Rule
from .terms import (GLUE_TYPES, Comp, ExtSet, Gen, GlueIsoFwd, GlueOb, IdHom,
                    Inv, IsoTerm, PartialElement, Restrict, Term, TermError,
                    collapse_component, compose_word, ctx_of, map_payload,
                    payload_terms, restrict, restrict_partial_raw)

DEFAULT_BUDGET = 100_000
STRATEGIES = ("leftmost-outermost", "leftmost-innermost", "rightmost-outermost",
              "rightmost-innermost", "random")


class BudgetExceeded(RuntimeError):
    def __init__(self, budget: int):
        self.budget = budget
        super().__init__(f"rewrite step budget of {budget} exceeded")


class IncompatiblePieces(TermError):
    def __init__(self, c1: ConjunctSystem, c2: ConjunctSystem, meet: Substitution,
                 nf1: Any, nf2: Any):
        self.c1, self.c2, self.meet, self.nf1, self.nf2 = c1, c2, meet, nf1, nf2
        super().__init__(f"pieces on {c1} and {c2} disagree at {meet}: {nf1} vs {nf2}")


def default_budget() -> int:
    raw = os.environ.get("RF_STEP_BUDGET")
    if raw:
        try:
            value = int(raw)
        except ValueError:
            raise ValueError(f"RF_STEP_BUDGET must be an integer, got {raw!r}") from None
        if value <= 0:
            raise ValueError("RF_STEP_BUDGET must be positive")
        return value
    return DEFAULT_BUDGET


def inverse_atom(a: Term) -> Optional[Term]:
    """The formal inverse of an atomic glue iso (or its inverse), if ``a`` is one."""
    if isinstance(a, Inv) and isinstance(a.arg, GlueIsoFwd):
        return a.arg
    if isinstance(a, GlueIsoFwd):
        return Inv(a)
    return None


def atom_src(a: Term) -> Term:
    match a:
        case Gen(_, ("hom", s, _), sub):
            return Gen(s, "ob", sub)
        case GlueIsoFwd(x, _):
            return x
        case Inv(GlueIsoFwd(x, p)):
            return GlueOb(x, p)
    raise TermError(f"not an atomic hom: {a}")


def atom_dst(a: Term) -> Term:
    match a:
        case Gen(_, ("hom", _, d), sub):
            return Gen(d, "ob", sub)
        case GlueIsoFwd(x, p):
            return GlueOb(x, p)
        case Inv(GlueIsoFwd(x, _)):
            return x
    raise TermError(f"not an atomic hom: {a}")


@dataclass(frozen=True)
class _CompiledRule:
    lhs: tuple
    rhs: tuple  # ((name, src, dst), ...)
    src: str


def _compile(p: Optional[Presentation]) -> dict:
    """Rules indexed by the last (innermost) name of their left side."""
    if p is None:
        return {}
    table = p.hom_table
    out: dict = {}
    for r in p.rules:
        rhs = tuple((n, table[n].src, table[n].dst) for n in r.rhs)
        out.setdefault(r.lhs[-1], []).append(_CompiledRule(r.lhs, rhs, r.src))
    return out


def _match_rule(rule: _CompiledRule, atoms: Sequence[Term]) -> Optional[Substitution]:
    """The common restriction of ``atoms`` if they spell ``rule.lhs``."""
    if len(atoms) != len(rule.lhs):
        return None
    sub = None
    for a, name in zip(atoms, rule.lhs):
        if not isinstance(a, Gen) or a.name != name or not isinstance(a.sort, tuple):
            return None
        if sub is None:
            sub = a.sub
        elif a.sub != sub:
            return None
    return sub


def _rule_rhs(rule: _CompiledRule, sub: Substitution) -> list:
    return [Gen(n, ("hom", s, d), sub) for n, s, d in rule.rhs]


class Normalizer:
    """Big-step normalizer for a presentation (or none: no user relations).

    Results are memoized per instance; the step budget applies to each
    top-level :meth:`nf` call."""

    def __init__(self, presentation: Optional[Presentation] = None,
                 budget: Optional[int] = None, memo_limit: int = 500_000):
        self.presentation = presentation
        self.budget = default_budget() if budget is None else budget
        self._rules = _compile(presentation)
        self._memo: dict = {}
        self._memo_limit = memo_limit
        self._steps = 0
        self.last_steps = 0

    # -- public -----------------------------------------------------------

    def nf(self, t: Term) -> Term:
        self._steps = 0
        if len(self._memo) > self._memo_limit:
            self._memo.clear()
        out = self._nf(t, None)
        self.last_steps = self._steps
        return out

    def nf_payload(self, payload: Any) -> Any:
        return map_payload(payload, self.nf)

    def eq(self, t: Term, u: Term) -> bool:
        return self.nf(t) == self.nf(u)

    def restrict_nf(self, t: Term, f: Substitution) -> Term:
        if ctx_of(t) != f.cod:
            raise CubeError(f"term over {ctx_of(t)} restricted along map into {f.cod}")
        self._steps = 0
        return self._nf(t, None if f.is_identity else f)

    # -- engine -----------------------------------------------------------

    def _tick(self, n: int = 1) -> None:
        self._steps += n
        if self._steps > self.budget:
            raise BudgetExceeded(self.budget)

    def _nf(self, t: Term, f: Optional[Substitution]) -> Term:
        key = (t, f)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        self._tick()
        out = self._eval(t, f)
        self._memo[key] = out
        return out

    def _eval(self, t: Term, f: Optional[Substitution]) -> Term:
        match t:
            case Restrict(u, g):
                if ctx_of(u) != g.cod:
                    raise CubeError(f"restriction into {g.cod} of a term over {ctx_of(u)}")
                h = g if f is None else compose(g, f)
                return self._nf(u, None if h.is_identity else h)
            case Gen(n, s, sub):
                return t if f is None else Gen(n, s, compose(sub, f))
            case IdHom(x):
                return IdHom(self._nf(x, f))
            case Comp(_, _) | Inv(_):
                atoms, src = self._word(t, f)
                return compose_word(atoms, src)
            case GlueOb(x, p) | GlueIsoFwd(x, p) | ExtSet(x, p):
                p2 = self._partial(p, f)
                if p2.decided:
                    return collapse_component(t, p2.pieces[0][1])
                return type(t)(self._nf(x, f), p2)
        raise TermError(f"not a term: {t!r}")

    def _partial(self, p: PartialElement, f: Optional[Substitution]) -> PartialElement:
        if f is None:
            pieces = tuple((c, map_payload(pl, lambda u: self._nf(u, None)))
                           for c, pl in p.pieces)
            return PartialElement(p.ctx, pieces)
        if p.ctx != f.cod:
            raise CubeError(f"partial element over {p.ctx} restricted along map into {f.cod}")
        pieces = []
        for c2 in cofib.restrict_conjuncts(p.conjuncts, f):
            h = compose(f, cofib.quotient(c2))
            for c, pl in p.pieces:
                r = factor_through(cofib.quotient(c), h)
                if r is not None:
                    rr = None if r.is_identity else r
                    pieces.append((c2, map_payload(pl, lambda u, rr=rr: self._nf(u, rr))))
                    break
        return PartialElement(f.dom, tuple(pieces))

    def _word(self, t: Term, f: Optional[Substitution]) -> tuple:
        """Normal word (outermost atom first) of ``t[f]`` and its source."""
        match t:
            case Comp(a, b):
                wa, _ = self._word(a, f)
                wb, src = self._word(b, f)
                return self._reduce(wa + wb), src
            case Inv(h):
                return self._inv_word(h, f)
            case Restrict(u, g):
                h = g if f is None else compose(g, f)
                return self._word(u, None if h.is_identity else h)
        n = self._nf(t, f)
        if isinstance(n, IdHom):
            return (), n.ob
        atoms = []
        while isinstance(n, Comp):
            atoms.append(n.left)
            n = n.right
        atoms.append(n)
        return tuple(atoms), atom_src(n)

    def _inv_word(self, h: Term, f: Optional[Substitution]) -> tuple:
        match h:
            case Restrict(u, g):
                k = g if f is None else compose(g, f)
                return self._inv_word(u, None if k.is_identity else k)
            case Inv(k):
                return self._word(k, f)
            case IdHom(x):
                return (), self._nf(x, f)
            case Comp(a, b):
                wb, _ = self._inv_word(b, f)
                wa, src = self._inv_word(a, f)
                return self._reduce(wb + wa), src
            case GlueIsoFwd(x, p):
                p2 = self._partial(p, f)
                if p2.decided:
                    return self._word(p2.pieces[0][1][1].inv, None)
                node = GlueIsoFwd(self._nf(x, f), p2)
                return (Inv(node),), GlueOb(node.base, node.partial)
        raise TermError(f"inverse of a non-invertible term: {h}")

    def _reduce(self, word: Sequence[Term]) -> tuple:
        """Stack reduction: the stack is kept irreducible, so every new redex
        ends at the atom just pushed."""
        stack: list = []
        pending = list(reversed(word))
        rules = self._rules
        while pending:
            a = pending.pop()
            if stack and inverse_atom(stack[-1]) == a:
                self._tick()
                stack.pop()
                continue
            stack.append(a)
            if isinstance(a, Gen) and a.name in rules:
                for rule in rules[a.name]:
                    n = len(rule.lhs)
                    if n > len(stack):
                        continue
                    sub = _match_rule(rule, stack[-n:])
                    if sub is None:
                        continue
                    self._tick()
                    del stack[-n:]
                    pending.extend(reversed(_rule_rhs(rule, sub)))
                    break
        return tuple(stack)


# ---------------------------------------------------------------------------
# small-step engine


def _children(t: Term) -> tuple:
    match t:
        case IdHom(x) | Inv(x) | Restrict(x, _):
            return (x,)
        case Comp(a, b):
            return (a, b)
        case GlueOb(x, p) | GlueIsoFwd(x, p) | ExtSet(x, p):
            return (x,) + tuple(u for _, pl in p.pieces for u in payload_terms(pl))
    return ()


def _rebuild(t: Term, kids: Sequence[Term]) -> Term:
    match t:
        case IdHom():
            return IdHom(kids[0])
        case Inv():
            return Inv(kids[0])
        case Restrict(_, f):
            return Restrict(kids[0], f)
        case Comp():
            return Comp(kids[0], kids[1])
        case GlueOb(_, p) | GlueIsoFwd(_, p) | ExtSet(_, p):
            it = iter(kids[1:])
            pieces = []
            for c, pl in p.pieces:
                pieces.append((c, map_payload(pl, lambda _u: next(it))))
            return type(t)(kids[0], PartialElement(p.ctx, tuple(pieces)))
    raise TermError(f"cannot rebuild {t!r}")


class SmallStep:
    """One-rule-at-a-time rewriting with a selectable redex strategy."""

    def __init__(self, presentation: Optional[Presentation] = None,
                 budget: Optional[int] = None):
        self.presentation = presentation
        self.budget = default_budget() if budget is None else budget
        self._rules = _compile(presentation)
        self._all_rules = [r for rs in self._rules.values() for r in rs]

    def contract(self, t: Term, under_inv: bool = False) -> Optional[Term]:
        """The result of rewriting ``t`` at its root, or None."""
        match t:
            case Restrict(u, f):
                if f.is_identity:
                    return u
                match u:
                    case Restrict(v, g):
                        return Restrict(v, compose(g, f))
                    case Gen(n, s, sub):
                        return Gen(n, s, compose(sub, f))
                    case IdHom(x):
                        return IdHom(Restrict(x, f))
                    case Comp(a, b):
                        return Comp(Restrict(a, f), Restrict(b, f))
                    case Inv(h):
                        return Inv(Restrict(h, f))
                    case GlueOb(x, p) | GlueIsoFwd(x, p) | ExtSet(x, p):
                        p2 = restrict_partial_raw(
                            p, f, lambda v, r: v if r.is_identity else Restrict(v, r))
                        return type(u)(Restrict(x, f), p2)
                return None
            case GlueOb(_, p) | GlueIsoFwd(_, p) | ExtSet(_, p):
                if p.decided and not (under_inv and isinstance(t, GlueIsoFwd)):
                    return collapse_component(t, p.pieces[0][1])
                return None
            case Inv(h):
                match h:
                    case Inv(k):
                        return k
                    case IdHom(x):
                        return IdHom(x)
                    case Comp(a, b):
                        return Comp(Inv(b), Inv(a))
                    case GlueIsoFwd(_, p) if p.decided:
                        return p.pieces[0][1][1].inv
                return None
            case Comp(a, b):
                if isinstance(a, Comp):
                    return Comp(a.left, Comp(a.right, b))
                if isinstance(a, IdHom):
                    return b
                if isinstance(b, IdHom):
                    return a
                rest = b.right if isinstance(b, Comp) else None
                first = b.left if isinstance(b, Comp) else b
                inv = inverse_atom(a)
                if inv is not None and inv == first:
                    return rest if rest is not None else IdHom(atom_src(first))
                return self._user_rule(t)
        return None

    def _user_rule(self, t: Comp) -> Optional[Term]:
        for rule in self._all_rules:
            atoms = []
            cur: Optional[Term] = t
            for _ in rule.lhs:
                if cur is None:
                    break
                if isinstance(cur, Comp):
                    atoms.append(cur.left)
                    cur = cur.right
                else:
                    atoms.append(cur)
                    cur = None
            sub = _match_rule(rule, atoms)
            if sub is None:
                continue
            rhs = _rule_rhs(rule, sub)
            if cur is None:
                if rhs:
                    return compose_word(rhs)
                return IdHom(atom_src(atoms[-1]))
            return compose_word(rhs + [cur]) if rhs else cur
        return None

    def redexes(self, t: Term) -> list:
        """Paths (child-index tuples, pre-order) of every redex in ``t``."""
        out: list = []

        def walk(u: Term, path: tuple, under_inv: bool) -> None:
            if self.contract(u, under_inv) is not None:
                out.append(path)
            for k, v in enumerate(_children(u)):
                walk(v, path + (k,), isinstance(u, Inv))

        walk(t, (), False)
        return out

    def _replace(self, t: Term, path: tuple, parent_inv: bool = False) -> Term:
        if not path:
            new = self.contract(t, parent_inv)
            assert new is not None
            return new
        kids = list(_children(t))
        k = path[0]
        kids[k] = self._replace(kids[k], path[1:], isinstance(t, Inv))
        return _rebuild(t, kids)

    def choose(self, paths: list, strategy: str, rng: random.Random) -> tuple:
        if strategy == "random":
            return rng.choice(paths)
        side, depth = strategy.split("-")
        pset = set(paths)
        if depth == "outermost":
            cands = [p for p in paths if not any(p[:k] in pset for k in range(len(p)))]
        else:
            cands = [p for p in paths
                     if not any(q != p and q[:len(p)] == p for q in paths)]
        return cands[0] if side == "leftmost" else cands[-1]

    def normalize(self, t: Term, strategy: str = "leftmost-outermost",
                  seed: int = 0) -> Term:
        if strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {strategy!r}; choose from {STRATEGIES}")
        rng = random.Random(seed)
        for _ in range(self.budget):
            paths = self.redexes(t)
            if not paths:
                return t
            t = self._replace(t, self.choose(paths, strategy, rng))
        raise BudgetExceeded(self.budget)


# ---------------------------------------------------------------------------
# convenience API


_DEFAULT: dict = {}


def normalizer_for(presentation: Optional[Presentation] = None) -> Normalizer:
    """A shared normalizer per presentation (memo tables are reused)."""
    key = id(presentation) if presentation is not None else None
    nz = _DEFAULT.get(key)
    if nz is None or nz.presentation is not presentation:
        nz = Normalizer(presentation)
        _DEFAULT[key] = nz
    return nz


def normalize(t: Term, presentation: Optional[Presentation] = None,
              strategy: Optional[str] = None, seed: int = 0,
              budget: Optional[int] = None) -> Term:
    """Normal form of ``t``; ``strategy`` selects the small-step engine."""
    if strategy is None:
        nz = normalizer_for(presentation) if budget is None else Normalizer(presentation, budget)
        return nz.nf(t)
    return SmallStep(presentation, budget).normalize(t, strategy, seed)


def eq_terms(t: Term, u: Term, presentation: Optional[Presentation] = None,
             nz: Optional[Normalizer] = None) -> bool:
    nz = nz or normalizer_for(presentation)
    return nz.nf(t) == nz.nf(u)


def _as_normalizer(nz: Optional[Normalizer]) -> Normalizer:
    return nz if nz is not None else normalizer_for(None)


def check_compatible(p: PartialElement, nz: Optional[Normalizer] = None) -> None:
    """Raise :class:`IncompatiblePieces` unless overlapping pieces agree."""
    nz = _as_normalizer(nz)
    pieces = p.pieces
    for a in range(len(pieces)):
        ca, pa = pieces[a]
        for b in range(a + 1, len(pieces)):
            cb, pb = pieces[b]
            meet = cofib.make_conjunct(p.ctx, ca.equations + cb.equations)
            if meet is None:
                continue
            m = cofib.quotient(meet)
            ra = factor_through(cofib.quotient(ca), m)
            rb = factor_through(cofib.quotient(cb), m)
            na = map_payload(pa, lambda u: nz.restrict_nf(u, ra))
            nb = map_payload(pb, lambda u: nz.restrict_nf(u, rb))
            if na != nb:
                raise IncompatiblePieces(ca, cb, m, na, nb)


def mk_partial(alpha: Cofibration, ctx: Sequence[str], payloads: Sequence[Any],
               nz: Optional[Normalizer] = None) -> PartialElement:
    """A partial element with one payload per conjunct of ``dnf(alpha)``, each
    over that conjunct's quotient context."""
    ctx = tuple(ctx)
    conjs = cofib.dnf(alpha, ctx)
    payloads = tuple(payloads)
    if len(payloads) != len(conjs):
        raise TermError(f"{len(conjs)} conjuncts but {len(payloads)} payloads "
                        f"for {cofib.show_dnf(conjs)}")
    for c, pl in zip(conjs, payloads):
        _check_payload(pl, cofib.quotient(c).dom)
    p = PartialElement(ctx, tuple(zip(conjs, payloads)))
    check_compatible(p, nz)
    return p


def _check_payload(pl: Any, ctx: tuple) -> None:
    if isinstance(pl, Term):
        terms = (pl,)
    elif isinstance(pl, tuple) and len(pl) == 2 and isinstance(pl[1], IsoTerm):
        terms = (pl[0], pl[1].fwd, pl[1].inv)
    else:
        raise TermError(f"payload must be a term or (ob, IsoTerm): {pl!r}")
    for u in terms:
        if ctx_of(u) != ctx:
            raise TermError(f"payload {u} lives over {ctx_of(u)}, expected {ctx}")


def system(ctx: Sequence[str], entries: Iterable[tuple],
           nz: Optional[Normalizer] = None) -> PartialElement:
    """``[phi_1 -> u_1, ..., phi_n -> u_n]`` with each ``u_k`` a total payload
    over ``ctx``; checks that entries agree wherever they overlap."""
    ctx = tuple(ctx)
    nz = _as_normalizer(nz)
    entries = list(entries)
    for _, pl in entries:
        _check_payload(pl, ctx)
    conjs = cofib.dnf(cofib.disj(*(phi for phi, _ in entries)), ctx)
    dnfs = [cofib.dnf(phi, ctx) for phi, _ in entries]
    # entries subsumed by another never become pieces, so compare all overlaps here
    for a in range(len(entries)):
        for b in range(a + 1, len(entries)):
            for ca in dnfs[a]:
                for cb in dnfs[b]:
                    meet = cofib.make_conjunct(ctx, ca.equations + cb.equations)
                    if meet is None:
                        continue
                    q = cofib.quotient(meet)
                    va = map_payload(entries[a][1], lambda u: nz.restrict_nf(u, q))
                    vb = map_payload(entries[b][1], lambda u: nz.restrict_nf(u, q))
                    if va != vb:
                        raise IncompatiblePieces(ca, cb, q, va, vb)
    pieces = []
    for c in conjs:
        q = cofib.quotient(c)
        chosen = None
        for (phi, pl), d in zip(entries, dnfs):
            if not any(cofib.conjunct_entails(c, e) for e in d):
                continue
            val = map_payload(pl, lambda u: nz.restrict_nf(u, q))
            if chosen is None:
                chosen = val
            elif val != chosen:
                raise IncompatiblePieces(c, c, q, chosen, val)
        if chosen is None:  # pragma: no cover - each conjunct comes from an entry
            raise TermError(f"no entry covers {c}")
        pieces.append((c, chosen))
    p = PartialElement(ctx, tuple(pieces))
    check_compatible(p, nz)
    return p


def empty_partial(ctx: Sequence[str]) -> PartialElement:
    return PartialElement(tuple(ctx), ())


# ---------------------------------------------------------------------------
# sorts


def is_invertible(t: Term) -> bool:
    match t:
        case IdHom() | GlueIsoFwd():
            return True
        case Inv(h) | Restrict(h, _):
            return is_invertible(h)
        case Comp(a, b):
            return is_invertible(a) and is_invertible(b)
    return False


def sort_of(t: Term, nz: Optional[Normalizer] = None) -> Any:
    """``"ob"``, ``"elt"`` or ``("hom", src, dst)`` with normal-form endpoints;
    raises :class:`TermError` on ill-sorted input."""
    nz = _as_normalizer(nz)
    match t:
        case Gen(_, ("hom", s, d), sub):
            return ("hom", Gen(s, "ob", sub), Gen(d, "ob", sub))
        case Gen(_, s, _):
            if s not in ("ob", "elt"):
                raise TermError(f"unknown sort {s!r}")
            return s
        case IdHom(x):
            if sort_of(x, nz) != "ob":
                raise TermError(f"identity on a non-object {x}")
            x2 = nz.nf(x)
            return ("hom", x2, x2)
        case Comp(a, b):
            sa, sb = sort_of(a, nz), sort_of(b, nz)
            if not (isinstance(sa, tuple) and isinstance(sb, tuple)):
                raise TermError(f"composite of non-homs in {t}")
            if sa[1] != sb[2]:
                raise TermError(f"cannot compose {a} after {b}: {sb[2]} != {sa[1]}")
            return ("hom", sb[1], sa[2])
        case Inv(h):
            if not is_invertible(h):
                raise TermError(f"inverse of a non-invertible term {h}")
            s = sort_of(h, nz)
            return ("hom", s[2], s[1])
        case Restrict(u, f):
            if ctx_of(u) != f.cod:
                raise CubeError(f"restriction into {f.cod} of a term over {ctx_of(u)}")
            s = sort_of(u, nz)
            if isinstance(s, tuple):
                return ("hom", nz.restrict_nf(s[1], f), nz.restrict_nf(s[2], f))
            return s
        case GlueOb(x, p) | GlueIsoFwd(x, p):
            if sort_of(x, nz) != "ob":
                raise TermError(f"glue over a non-object {x}")
            if ctx_of(x) != p.ctx:
                raise TermError("glue base and partial element live in different contexts")
            for c, pl in p.pieces:
                _check_glue_piece(x, c, pl, nz)
            if isinstance(t, GlueOb):
                return "ob"
            return ("hom", nz.nf(x), nz.nf(GlueOb(x, p)))
        case ExtSet(x, p):
            if sort_of(x, nz) != "elt":
                raise TermError(f"ext over a non-element {x}")
            if ctx_of(x) != p.ctx:
                raise TermError("ext base and partial element live in different contexts")
            for _, pl in p.pieces:
                if sort_of(pl, nz) != "elt":
                    raise TermError(f"ext piece {pl} is not an element")
            return "elt"
    raise TermError(f"not a term: {t!r}")


def _check_glue_piece(x: Term, c: ConjunctSystem, pl: Any, nz: Normalizer) -> None:
    if not (isinstance(pl, tuple) and len(pl) == 2 and isinstance(pl[1], IsoTerm)):
        raise TermError(f"glue piece must be (ob, IsoTerm): {pl!r}")
    y, iso = pl
    xq = nz.restrict_nf(x, cofib.quotient(c))
    yn = nz.nf(y)
    want_f = ("hom", xq, yn)
    want_g = ("hom", yn, xq)
    if sort_of(iso.fwd, nz) != want_f or sort_of(iso.inv, nz) != want_g:
        raise TermError(f"glue piece on {c} is not an iso between {xq} and {yn}")


def iso_laws_hold(iso: IsoTerm, nz: Optional[Normalizer] = None) -> bool:
    """Both composites of an iso normalize to identities."""
    nz = _as_normalizer(nz)
    s = sort_of(iso.fwd, nz)
    return (nz.nf(Comp(iso.inv, iso.fwd)) == IdHom(s[1])
            and nz.nf(Comp(iso.fwd, iso.inv)) == IdHom(s[2]))


def glue_iso(x: Term, p: PartialElement) -> IsoTerm:
    g = GlueIsoFwd(x, p)
    return IsoTerm(g, Inv(g))


def identity_iso(x: Term) -> IsoTerm:
    return IsoTerm(IdHom(x), IdHom(x))


def compose_iso(outer: IsoTerm, inner: IsoTerm) -> IsoTerm:
    """``outer . inner``."""
    return IsoTerm(Comp(outer.fwd, inner.fwd), Comp(inner.inv, outer.inv))


def inverse_iso(e: IsoTerm) -> IsoTerm:
    return IsoTerm(e.inv, e.fwd)


def boundary_violations(node: Term, nz: Optional[Normalizer] = None) -> list:
    """Check the extension contract of one glue/ext node: restricted to each
    conjunct's quotient it normalizes to that conjunct's payload."""
    nz = _as_normalizer(nz)
    if not isinstance(node, GLUE_TYPES):
        raise TermError(f"not a glue/ext node: {node}")
    bad = []
    for c, pl in node.partial.pieces:
        q = cofib.quotient(c)
        lhs = nz.nf(restrict(node, q)) if not q.is_identity else nz.nf(node)
        rhs = nz.nf(collapse_component(node, pl))
        if lhs != rhs:
            bad.append((c, q, lhs, rhs))
        if isinstance(node, GlueIsoFwd):
            li = nz.nf(Restrict(Inv(node), q))
            ri = nz.nf(pl[1].inv)
            if li != ri:
                bad.append((c, q, li, ri))
    return bad


__all__ = [
    "Normalizer", "SmallStep", "STRATEGIES", "BudgetExceeded", "IncompatiblePieces",
    "DEFAULT_BUDGET", "default_budget", "normalize", "eq_terms", "normalizer_for",
    "mk_partial", "system", "empty_partial", "check_compatible", "sort_of",
    "is_invertible", "iso_laws_hold", "glue_iso", "identity_iso", "compose_iso",
    "inverse_iso", "boundary_violations", "inverse_atom", "atom_src", "atom_dst",
    "Rule",
]
