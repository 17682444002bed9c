"""Bounded enumeration of normal-form terms.

Terms are generated by exact constructor-node count (generators count zero,
every payload term of a glue/ext node counts), then kept only if they are
their own normal form.  Output is sorted by (size, printed form).
"""

from __future__ import annotations

from itertools import combinations, product
from typing import Optional, Sequence

from . import cofib
from .cube import check_ctx, critical_substitutions
from .presentation import Presentation
from .rewrite import (IncompatiblePieces, Normalizer, atom_dst, atom_src,
                      check_compatible, iso_laws_hold)
from .terms import (Comp, ExtSet, GlueIsoFwd, GlueOb, IdHom, Inv, IsoTerm,
                    PartialElement, Term, ctx_of, show)

SORTS = ("ob", "hom", "elt")
MAX_GLUE_CTX = 2


def _compositions(total: int, parts: int):
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def partial_shapes(ctx: Sequence[str]) -> list:
    """Every non-decided canonical DNF over ``ctx`` (including the empty one)."""
    ctx = check_ctx(ctx)
    conjs = []
    for q in critical_substitutions(ctx):
        if q.is_identity:
            continue
        pairs = [(v, e) for v, e in q.items() if e != v]
        c = cofib.make_conjunct(ctx, pairs)
        if c not in conjs:
            conjs.append(c)
    seen, out = set(), []
    for k in range(len(conjs) + 1):
        for subset in combinations(conjs, k):
            canon = cofib.canonical_conjuncts(ctx, subset)
            if canon not in seen:
                seen.add(canon)
                out.append(canon)
    return out


class Enumerator:
    """Memoized exact-size enumeration for one presentation."""

    def __init__(self, pres: Presentation, nz: Optional[Normalizer] = None,
                 glue: bool = True):
        self.pres = pres
        self.nz = nz or Normalizer(pres)
        self.glue = glue
        self._memo: dict = {}

    # -- public -----------------------------------------------------------

    def enumerate(self, sort: str, ctx: Sequence[str] = (), depth: int = 0) -> list:
        if depth < 0:
            raise ValueError("depth must be non-negative")
        if sort not in SORTS:
            raise ValueError(f"sort must be one of {SORTS}")
        ctx = check_ctx(ctx)
        out = []
        for n in range(depth + 1):
            out.extend(self.exact(sort, ctx, n))
        return out

    def exact(self, sort: str, ctx: tuple, n: int) -> list:
        key = (sort, ctx, n)
        hit = self._memo.get(key)
        if hit is None:
            found = {t for t in getattr(self, f"_{sort}")(ctx, n) if self._is_nf(t)}
            hit = sorted(found, key=show)
            self._memo[key] = hit
        return hit

    def homs_between(self, src: Term, dst: Term, depth: int) -> list:
        ctx = ctx_of(src)
        return [h for h in self.enumerate("hom", ctx, depth)
                if self.hom_ends(h) == (src, dst)]

    def hom_ends(self, h: Term) -> tuple:
        if isinstance(h, IdHom):
            return h.ob, h.ob
        last = h
        while isinstance(last, Comp):
            last = last.right
        first = h.left if isinstance(h, Comp) else h
        return atom_src(last), atom_dst(first)

    # -- generation -------------------------------------------------------

    def _is_nf(self, t: Term) -> bool:
        return self.nz.nf(t) == t

    def _base_gens(self, ctx: tuple, sort: str) -> list:
        if sort == self.pres.base_sort:
            return [self.pres.ob(n, ctx) for n in self.pres.objects]
        return []

    def _ob(self, ctx: tuple, n: int) -> list:
        if self.pres.theory != "CAT":
            return []
        if n == 0:
            return self._base_gens(ctx, "ob")
        if not self.glue:
            return []
        return [GlueOb(b, p) for b, p in self._glued(ctx, n - 1, "ob")]

    def _elt(self, ctx: tuple, n: int) -> list:
        if self.pres.theory != "SET":
            return []
        if n == 0:
            return self._base_gens(ctx, "elt")
        if not self.glue:
            return []
        return [ExtSet(b, p) for b, p in self._glued(ctx, n - 1, "elt")]

    def _glued(self, ctx: tuple, budget: int, sort: str) -> list:
        """(base, partial) pairs of total size ``budget``."""
        if len(ctx) > MAX_GLUE_CTX:
            raise ValueError(f"glue enumeration supports contexts of at most "
                             f"{MAX_GLUE_CTX} names")
        out = []
        shapes = partial_shapes(ctx)
        for m in range(budget + 1):
            for b in self.exact(sort, ctx, m):
                for shape in shapes:
                    for p in self._partials(b, shape, ctx, budget - m, sort):
                        out.append((b, p))
        return out

    def _partials(self, base: Term, shape: tuple, ctx: tuple, budget: int, sort: str):
        if not shape:
            if budget == 0:
                yield PartialElement(ctx, ())
            return
        for sizes in _compositions(budget, len(shape)):
            options = []
            for c, k in zip(shape, sizes):
                q = cofib.quotient(c)
                if sort == "elt":
                    options.append(self.exact("elt", q.dom, k))
                else:
                    options.append(self._isos_from(self.nz.restrict_nf(base, q), q.dom, k))
                if not options[-1]:
                    break
            else:
                for payloads in product(*options):
                    p = PartialElement(ctx, tuple(zip(shape, payloads)))
                    try:
                        check_compatible(p, self.nz)
                    except IncompatiblePieces:
                        continue
                    yield p

    def _isos_from(self, x: Term, ctx: tuple, k: int) -> list:
        """``(y, iso)`` payloads with ``iso : x ~ y`` of total size ``k``."""
        out = []
        for sy in range(k + 1):
            for y in self.exact("ob", ctx, sy):
                for sf in range(k - sy + 1):
                    si = k - sy - sf
                    fwds = [h for h in self.exact("hom", ctx, sf) if self.hom_ends(h) == (x, y)]
                    if not fwds:
                        continue
                    invs = [h for h in self.exact("hom", ctx, si) if self.hom_ends(h) == (y, x)]
                    for f in fwds:
                        for g in invs:
                            iso = IsoTerm(f, g)
                            if iso_laws_hold(iso, self.nz):
                                out.append((y, iso))
        return out

    def _atoms(self, ctx: tuple, n: int) -> list:
        out = []
        if n == 0:
            out += [self.pres.hom(h.name, ctx) for h in self.pres.homs]
        if self.glue and n >= 1:
            out += [GlueIsoFwd(o.base, o.partial) for o in self.exact("ob", ctx, n)
                    if isinstance(o, GlueOb)]
            out += [Inv(GlueIsoFwd(o.base, o.partial)) for o in self.exact("ob", ctx, n - 1)
                    if isinstance(o, GlueOb)]
        return out

    def _hom(self, ctx: tuple, n: int) -> list:
        if self.pres.theory != "CAT":
            return []
        out = []
        if n >= 1:
            out += [IdHom(x) for x in self.exact("ob", ctx, n - 1)]
        out += self._chains(ctx, n)
        return out

    def _chains(self, ctx: tuple, n: int) -> list:
        key = ("chain", ctx, n)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        out = list(self._atoms(ctx, n))
        for m in range(n):
            rest_size = n - 1 - m
            rests = self._chains(ctx, rest_size)
            if not rests:
                continue
            for a in self._atoms(ctx, m):
                src = atom_src(a)
                for r in rests:
                    if self.hom_ends(r)[1] != src:
                        continue
                    t = Comp(a, r)
                    if self._is_nf(t):
                        out.append(t)
        self._memo[key] = out
        return out


def enumerate_terms(pres: Presentation, sort: str, ctx: Sequence[str] = (), depth: int = 0,
                    nz: Optional[Normalizer] = None, glue: bool = True) -> list:
    """All normal forms of ``sort`` over ``ctx`` with at most ``depth`` nodes."""
    return Enumerator(pres, nz, glue).enumerate(sort, ctx, depth)


__all__ = ["Enumerator", "enumerate_terms", "partial_shapes", "SORTS"]
