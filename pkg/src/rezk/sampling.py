"""Seeded random generators for formulas, terms, glue lines and filling
problems, used by the property tests, the acceptance checks and the CLI."""

from __future__ import annotations

import random
from functools import lru_cache
from typing import Optional, Sequence

from . import cofib
from .cofib import BOT, TOP, And, Cofibration, Eq, Forall, Or
from .cube import Substitution, all_substitutions, check_ctx, fresh_name
from .kan import FillingProblem, problem_from_total
from .presentation import Presentation
from .rewrite import Normalizer, is_invertible, iso_laws_hold, mk_partial
from .terms import (Comp, ExtSet, Gen, GlueIsoFwd, GlueOb, IdHom, Inv, IsoTerm,
                    Restrict, Term, ctx_of, restrict)

NAMES = ("i", "j", "k")


# ---------------------------------------------------------------------------
# formulas


def random_expr(rng: random.Random, names: Sequence[str]):
    pool = [0, 1] + list(names)
    return rng.choice(pool)


def random_cof(rng: random.Random, names: Sequence[str], size: int = 5,
               forall: bool = True) -> Cofibration:
    """A random formula with at most ``size`` AST nodes over ``names``."""
    if size <= 1 or rng.random() < 0.25:
        roll = rng.random()
        if roll < 0.08:
            return TOP
        if roll < 0.16:
            return BOT
        return Eq(random_expr(rng, names), random_expr(rng, names))
    if forall and size >= 2 and rng.random() < 0.12:
        binder = rng.choice(list(names) + ["m"])
        return Forall(binder, random_cof(rng, tuple(set(names) | {binder}), size - 1, forall))
    left = rng.randint(1, size - 2) if size > 2 else 1
    node = And if rng.random() < 0.5 else Or
    return node(random_cof(rng, names, left, forall),
                random_cof(rng, names, max(1, size - 1 - left), forall))


def random_ctx(rng: random.Random, max_dims: int = 2, pool: Sequence[str] = NAMES) -> tuple:
    n = rng.randint(0, max_dims)
    return tuple(sorted(rng.sample(list(pool), n), key=list(pool).index))


def random_substitution(rng: random.Random, dom: Sequence[str], cod: Sequence[str]) -> Substitution:
    return Substitution(tuple(dom), tuple(cod),
                        tuple(random_expr(rng, dom) for _ in cod))


def random_alpha(rng: random.Random, ctx: Sequence[str], size: int = 3) -> Cofibration:
    """A formula over ``ctx`` without binders, biased towards small equations."""
    if not ctx:
        return rng.choice([TOP, BOT, BOT])
    return random_cof(rng, ctx, size, forall=False)


# ---------------------------------------------------------------------------
# elements of the free set with ext


def random_element(rng: random.Random, pres: Presentation, ctx: Sequence[str],
                   depth: int = 2, nz: Optional[Normalizer] = None) -> Term:
    """A normal element of the SET completion over ``ctx``."""
    nz = nz or Normalizer(pres)
    ctx = check_ctx(ctx)
    base = pres.ob(rng.choice(pres.objects), ctx)
    if depth <= 0 or rng.random() < 0.3:
        return base
    inner = random_element(rng, pres, ctx, depth - 1, nz)
    alpha = random_alpha(rng, ctx)
    total = random_element(rng, pres, ctx, depth - 1, nz)
    payloads = [nz.restrict_nf(total, cofib.quotient(c)) for c in cofib.dnf(alpha, ctx)]
    return nz.nf(ExtSet(inner, mk_partial(alpha, ctx, payloads, nz)))


# ---------------------------------------------------------------------------
# objects, isos and morphisms of the CAT completion


@lru_cache(maxsize=None)
def _base_inverses(pres: Presentation) -> dict:
    nz = Normalizer(pres)
    out = {}
    for h in pres.homs:
        for k in pres.homs:
            if (k.src, k.dst) == (h.dst, h.src) and iso_laws_hold(
                    IsoTerm(pres.hom(h.name), pres.hom(k.name)), nz):
                out[h.name] = k.name
                break
    return out


def _inverse_atom(pres: Presentation, a: Term) -> Term:
    match a:
        case GlueIsoFwd():
            return Inv(a)
        case Inv(g):
            return g
        case Gen(n, _, sub):
            k = pres.hom_table[_base_inverses(pres)[n]]
            return Gen(k.name, ("hom", k.src, k.dst), sub)
    raise TypeError(a)


def _steps_from(rng: random.Random, pres: Presentation, o: Term, ctx: tuple, depth: int,
                nz: Normalizer, isos_only: bool) -> list:
    """Atomic morphisms out of the normal object ``o``."""
    out = []
    if isinstance(o, Gen):
        invs = _base_inverses(pres)
        for h in pres.homs:
            if h.src == o.name and (not isos_only or h.name in invs):
                out.append(pres.hom(h.name, ctx))
    if isinstance(o, GlueOb):
        out.append(Inv(GlueIsoFwd(o.base, o.partial)))
    if depth > 0:
        p = random_partial_iso(rng, pres, o, ctx, depth - 1, nz)
        out.append(GlueIsoFwd(o, p))
    return out


def _walk(rng: random.Random, pres: Presentation, x: Term, ctx: tuple, steps: int,
          depth: int, nz: Normalizer, isos_only: bool) -> list:
    atoms, o = [], x
    for _ in range(steps):
        options = _steps_from(rng, pres, o, ctx, depth, nz, isos_only)
        if not options:
            break
        a = rng.choice(options)
        atoms.insert(0, a)
        o = nz.nf(_atom_dst(a))
    return atoms


def _atom_dst(a: Term) -> Term:
    match a:
        case Gen(_, ("hom", _, d), sub):
            return Gen(d, "ob", sub)
        case GlueIsoFwd(x, p):
            return GlueOb(x, p)
        case Inv(GlueIsoFwd(x, _)):
            return x
    raise TypeError(a)


def _word(atoms: Sequence[Term], src: Term) -> Term:
    if not atoms:
        return IdHom(src)
    out = atoms[-1]
    for a in reversed(atoms[:-1]):
        out = Comp(a, out)
    return out


def random_iso(rng: random.Random, pres: Presentation, x: Term, ctx: Sequence[str],
               depth: int = 1, nz: Optional[Normalizer] = None, steps: int = 2) -> tuple:
    """``(y, e)`` with ``e : x ~ y`` a normal iso built from a random walk."""
    nz = nz or Normalizer(pres)
    ctx = tuple(ctx)
    atoms = _walk(rng, pres, x, ctx, rng.randint(0, steps), depth, nz, True)
    y = nz.nf(_atom_dst(atoms[0])) if atoms else x
    fwd = _word(atoms, x)
    inv = _word([_inverse_atom(pres, a) for a in reversed(atoms)], y)
    return y, IsoTerm(nz.nf(fwd), nz.nf(inv))


def random_partial_iso(rng: random.Random, pres: Presentation, x: Term, ctx: Sequence[str],
                       depth: int = 1, nz: Optional[Normalizer] = None,
                       alpha: Optional[Cofibration] = None):
    """A compatible partial iso-extension of ``x``: a random total ``(y, e)``
    restricted to each conjunct of a random ``alpha``."""
    nz = nz or Normalizer(pres)
    ctx = tuple(ctx)
    alpha = random_alpha(rng, ctx) if alpha is None else alpha
    y, e = random_iso(rng, pres, x, ctx, depth, nz)
    payloads = []
    for c in cofib.dnf(alpha, ctx):
        q = cofib.quotient(c)
        payloads.append((nz.restrict_nf(y, q),
                         IsoTerm(nz.restrict_nf(e.fwd, q), nz.restrict_nf(e.inv, q))))
    return mk_partial(alpha, ctx, payloads, nz)


def random_object(rng: random.Random, pres: Presentation, ctx: Sequence[str],
                  depth: int = 2, nz: Optional[Normalizer] = None) -> Term:
    """A normal object of the CAT completion over ``ctx``."""
    nz = nz or Normalizer(pres)
    ctx = check_ctx(ctx)
    x = pres.ob(rng.choice(pres.objects), ctx)
    for _ in range(rng.randint(0, depth)):
        x = nz.nf(GlueOb(x, random_partial_iso(rng, pres, x, ctx, depth - 1, nz)))
    return x


def random_glue_line(rng: random.Random, pres: Presentation, ctx: Sequence[str], dim: str,
                     depth: int = 2, nz: Optional[Normalizer] = None) -> Term:
    """A normal object line over ``ctx + (dim,)`` whose head is a glue node."""
    nz = nz or Normalizer(pres)
    L = check_ctx(tuple(ctx) + (dim,))
    for _ in range(50):
        x = random_object(rng, pres, L, depth - 1, nz)
        alpha = random_alpha(rng, L)
        t = nz.nf(GlueOb(x, random_partial_iso(rng, pres, x, L, depth - 1, nz, alpha)))
        if isinstance(t, GlueOb):
            return t
    return nz.nf(GlueOb(pres.ob(pres.objects[0], L), mk_partial(BOT, L, (), nz)))


def random_hom(rng: random.Random, pres: Presentation, x: Term, ctx: Sequence[str],
               depth: int = 1, nz: Optional[Normalizer] = None, steps: int = 3) -> Term:
    """A normal morphism out of ``x`` (any atoms, not only isos)."""
    nz = nz or Normalizer(pres)
    atoms = _walk(rng, pres, x, tuple(ctx), rng.randint(0, steps), depth, nz, False)
    return nz.nf(_word(atoms, x))


# ---------------------------------------------------------------------------
# non-normal terms


def _scramble(rng: random.Random, t: Term, ctx: tuple, pres: Presentation, budget: int) -> Term:
    """An equal but non-normal presentation of ``t``: identities, left nesting,
    inverses of composites and restriction wrappers."""
    if budget <= 0:
        return t
    roll = rng.random()
    if roll < 0.2 and ctx:
        # go up to a bigger context and come back along a face
        extra = fresh_name("w", ctx)
        big = ctx + (extra,)
        back = Substitution(ctx, big, ctx + (random_expr(rng, ctx),))
        up = restrict(t, Substitution(big, ctx, ctx))
        return Restrict(_scramble(rng, up, big, pres, budget - 1), back)
    match t:
        case Comp(a, Comp(b, c)) if roll < 0.5:
            return Comp(Comp(_scramble(rng, a, ctx, pres, budget - 1), b),
                        _scramble(rng, c, ctx, pres, budget - 1))
        case Comp(a, b):
            if roll < 0.7:
                return Comp(Comp(_scramble(rng, a, ctx, pres, budget - 1), IdHom(_src_of(a))),
                            _scramble(rng, b, ctx, pres, budget - 1))
            return Comp(_scramble(rng, a, ctx, pres, budget - 1),
                        _scramble(rng, b, ctx, pres, budget - 1))
        case Inv(GlueIsoFwd() as g) if roll < 0.6:
            return Inv(Comp(IdHom(GlueOb(g.base, g.partial)), g))
        case GlueOb(x, p) | GlueIsoFwd(x, p) | ExtSet(x, p):
            return type(t)(_scramble(rng, x, ctx, pres, budget - 1), p)
    if roll < 0.6 and _is_hom(t):
        return Comp(t, IdHom(_src_of(t)))
    return t


def _is_hom(t: Term) -> bool:
    return isinstance(t, (Comp, IdHom, Inv, GlueIsoFwd)) or (
        isinstance(t, Gen) and isinstance(t.sort, tuple))


def _src_of(t: Term) -> Term:
    match t:
        case Comp(_, b):
            return _src_of(b)
        case IdHom(x):
            return x
        case Gen(_, ("hom", s, _), sub):
            return Gen(s, "ob", sub)
        case GlueIsoFwd(x, _):
            return x
        case Inv(GlueIsoFwd(x, p)):
            return GlueOb(x, p)
        case Inv(h):
            return _dst_of(h)
        case Restrict(u, f):
            return restrict(_src_of(u), f)
    raise TypeError(t)


def _dst_of(t: Term) -> Term:
    match t:
        case Comp(a, _):
            return _dst_of(a)
        case IdHom(x):
            return x
        case Gen(_, ("hom", _, d), sub):
            return Gen(d, "ob", sub)
        case GlueIsoFwd(x, p):
            return GlueOb(x, p)
        case Inv(h):
            return _src_of(h)
        case Restrict(u, f):
            return restrict(_dst_of(u), f)
    raise TypeError(t)


def random_term(rng: random.Random, pres: Presentation, ctx: Sequence[str] = (),
                depth: int = 2, nz: Optional[Normalizer] = None, scramble: int = 4) -> Term:
    """A well-sorted, usually non-normal term over ``ctx``."""
    nz = nz or Normalizer(pres)
    ctx = check_ctx(ctx)
    if pres.theory == "SET":
        t = random_element(rng, pres, ctx, depth, nz)
    elif rng.random() < 0.3:
        t = random_object(rng, pres, ctx, depth, nz)
    else:
        x = random_object(rng, pres, ctx, depth - 1, nz)
        t = _word(_walk(rng, pres, x, ctx, rng.randint(1, 4), depth - 1, nz, False), x)
        if rng.random() < 0.25:
            y, e = random_iso(rng, pres, x, ctx, depth - 1, nz)
            if is_invertible(e.fwd) and rng.random() < 0.5:
                t = Inv(Comp(e.fwd, IdHom(x)))
            else:
                t = Comp(e.inv, e.fwd)
    return _scramble(rng, t, ctx, pres, scramble)


def random_triple(rng: random.Random, pres: Presentation, nz: Optional[Normalizer] = None,
                  depth: int = 2) -> tuple:
    """``(t, f, g)`` with ``t`` over ``C``, ``f : B -> C`` and ``g : A -> B``."""
    nz = nz or Normalizer(pres)
    C = random_ctx(rng, 2)
    B = random_ctx(rng, 2)
    A = random_ctx(rng, 2)
    t = random_term(rng, pres, C, depth, nz)
    return t, random_substitution_total(rng, B, C), random_substitution_total(rng, A, B)


def random_substitution_total(rng: random.Random, dom: Sequence[str],
                              cod: Sequence[str]) -> Substitution:
    subs = list(all_substitutions(tuple(dom), tuple(cod)))
    return rng.choice(subs)


# ---------------------------------------------------------------------------
# filling problems


def random_set_problem(rng: random.Random, pres: Presentation, max_dims: int = 2,
                       nz: Optional[Normalizer] = None, depth: int = 1) -> FillingProblem:
    """A random weak-composition problem in the SET completion; ``s`` is
    generic with probability one third."""
    nz = nz or Normalizer(pres)
    ctx = random_ctx(rng, max_dims, ("i", "j"))
    K = ctx + ("z",)
    line = random_element(rng, pres, K, depth, nz)
    alpha = random_alpha(rng, ctx)
    r = rng.choice([0, 1] + list(ctx))
    s = rng.choice([0, 1] + list(ctx) + ["s", "s"])
    return problem_from_total(ctx, r, s, alpha, line, "z", nz=nz)


__all__ = [
    "random_cof", "random_ctx", "random_expr", "random_alpha", "random_substitution",
    "random_substitution_total", "random_element", "random_iso", "random_partial_iso",
    "random_object", "random_glue_line", "random_hom", "random_term", "random_triple",
    "random_set_problem",
]
