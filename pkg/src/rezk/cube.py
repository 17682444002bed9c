"""The cartesian cube category.

Objects are dimension contexts (ordered tuples of distinct names).  A morphism
``J -> I`` is stored as a :class:`Substitution` assigning to every name of ``I``
an interval expression over ``J``: either an endpoint ``0``/``1`` or a name of
``J``.  Restricting a term along such a morphism is literal variable
replacement.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Iterable, Iterator, Mapping, Optional, Sequence, Union

IExpr = Union[int, str]
DimCtx = tuple  # tuple[str, ...]

_NAME = re.compile(r"^[A-Za-z_][A-Za-z0-9_']*$")


class CubeError(ValueError):
    """Structural error: context mismatch, name collision, bad assignment."""


def is_const(e: IExpr) -> bool:
    return isinstance(e, int)


def check_ctx(ctx: Sequence[str]) -> DimCtx:
    ctx = tuple(ctx)
    if len(set(ctx)) != len(ctx):
        raise CubeError(f"duplicate dimension names in {ctx}")
    for name in ctx:
        if not isinstance(name, str) or not _NAME.match(name):
            raise CubeError(f"invalid dimension name {name!r}")
    return ctx


def expr_key(e: IExpr, ctx: Sequence[str] = ()) -> tuple:
    """Total order on interval expressions: endpoints first, then names by
    position in ``ctx`` (unknown names sort last, alphabetically)."""
    if is_const(e):
        return (0, e, "")
    try:
        return (1, ctx.index(e), "")
    except ValueError:
        return (2, 0, e)


def fresh_name(base: str, avoid: Iterable[str]) -> str:
    avoid = set(avoid)
    if base not in avoid:
        return base
    n = 1
    while f"{base}{n}" in avoid:
        n += 1
    return f"{base}{n}"


@dataclass(frozen=True)
class Substitution:
    """A cube morphism ``dom -> cod``; ``images[k]`` is the value of ``cod[k]``."""

    dom: DimCtx
    cod: DimCtx
    images: tuple

    def __post_init__(self):
        check_ctx(self.dom)
        check_ctx(self.cod)
        if len(self.images) != len(self.cod):
            raise CubeError("substitution must assign every codomain name")
        for e in self.images:
            if is_const(e):
                if e not in (0, 1):
                    raise CubeError(f"bad endpoint {e!r}")
            elif e not in self.dom:
                raise CubeError(f"{e!r} is not a name of the domain {self.dom}")

    @classmethod
    def make(cls, dom: Sequence[str], cod: Sequence[str],
             assignment: Mapping[str, IExpr]) -> "Substitution":
        cod = tuple(cod)
        extra = set(assignment) - set(cod)
        if extra:
            raise CubeError(f"assignment mentions unknown names {sorted(extra)}")
        missing = [v for v in cod if v not in assignment]
        if missing:
            raise CubeError(f"assignment missing names {missing}")
        return cls(tuple(dom), cod, tuple(assignment[v] for v in cod))

    def __getitem__(self, name: str) -> IExpr:
        try:
            return self.images[self.cod.index(name)]
        except ValueError:
            raise CubeError(f"{name!r} not in codomain {self.cod}") from None

    def apply(self, e: IExpr) -> IExpr:
        """Substitute into an interval expression over ``cod``."""
        return e if is_const(e) else self[e]

    def items(self) -> Iterator[tuple]:
        return zip(self.cod, self.images)

    @property
    def is_identity(self) -> bool:
        return self.dom == self.cod and self.images == self.cod

    def __str__(self) -> str:
        return "{" + ", ".join(f"{v}:={e}" for v, e in self.items()) + "}"


def identity(ctx: Sequence[str]) -> Substitution:
    ctx = tuple(ctx)
    return Substitution(ctx, ctx, ctx)


def compose(f: Substitution, g: Substitution) -> Substitution:
    """``f . g`` for ``f : J -> I`` and ``g : K -> J``."""
    if f.dom != g.cod:
        raise CubeError(f"cannot compose: {f.dom} != {g.cod}")
    return Substitution(g.dom, f.cod, tuple(g.apply(e) for e in f.images))


def weaken(f: Substitution, fresh: str) -> Substitution:
    if fresh in f.dom or fresh in f.cod:
        raise CubeError(f"{fresh!r} collides with {f.dom} or {f.cod}")
    return Substitution(f.dom + (fresh,), f.cod + (fresh,), f.images + (fresh,))


def projection(big: Sequence[str], small: Sequence[str]) -> Substitution:
    """The degeneracy ``big -> small`` sending every name of ``small`` to itself."""
    big = tuple(big)
    missing = [v for v in small if v not in big]
    if missing:
        raise CubeError(f"{missing} not in {big}")
    return Substitution(big, tuple(small), tuple(small))


def face(ctx: Sequence[str], name: str, value: IExpr) -> Substitution:
    """``{name := value}`` as a map out of ``ctx`` with ``name`` removed
    (when ``value`` is an endpoint or another name of ``ctx``)."""
    ctx = tuple(ctx)
    if name not in ctx:
        raise CubeError(f"{name!r} not in {ctx}")
    dom = tuple(v for v in ctx if v != name)
    return Substitution.make(dom, ctx, {v: (value if v == name else v) for v in ctx})


def parse_substitution(text: str, dom: Optional[Sequence[str]] = None,
                       cod: Optional[Sequence[str]] = None) -> Substitution:
    """Parse ``{i:=0, j:=k}``.  Omitted contexts are inferred: ``cod`` is the
    assigned names in order, ``dom`` the names appearing on the right."""
    body = text.strip()
    if not (body.startswith("{") and body.endswith("}")):
        raise CubeError(f"substitution must be braced: {text!r}")
    body = body[1:-1].strip()
    assignment: dict = {}
    if body:
        for part in body.split(","):
            if ":=" not in part:
                raise CubeError(f"expected 'name:=expr' in {part!r}")
            lhs, rhs = (s.strip() for s in part.split(":=", 1))
            if lhs in assignment:
                raise CubeError(f"{lhs!r} assigned twice")
            assignment[lhs] = int(rhs) if rhs in ("0", "1") else rhs
    if cod is None:
        cod = tuple(assignment)
    if dom is None:
        seen: list = []
        for e in assignment.values():
            if not is_const(e) and e not in seen:
                seen.append(e)
        dom = tuple(seen)
    return Substitution.make(dom, cod, assignment)


def _partitions(items: Sequence[str]) -> Iterator[list]:
    """Set partitions of ``items`` as lists of blocks, blocks in order of their
    first element (restricted growth strings)."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _partitions(rest):
        yield [[first]] + part
        for k in range(len(part)):
            yield part[:k] + [[first] + part[k]] + part[k + 1:]


def critical_substitutions(ctx: Sequence[str]) -> list:
    """One representative of every renaming class of maps ``Q -> ctx`` whose
    images are endpoints or pairwise-distinct blocks.  Every cube map into
    ``ctx`` factors through exactly one of them."""
    return list(_critical(check_ctx(ctx)))


@lru_cache(maxsize=256)
def _critical(ctx: tuple) -> tuple:
    out = []
    for kinds in product((0, 1, None), repeat=len(ctx)):
        free = [v for v, k in zip(ctx, kinds) if k is None]
        for part in _partitions(free):
            rep = {}
            for block in part:
                head = min(block, key=ctx.index)
                for v in block:
                    rep[v] = head
            dom = tuple(v for v in ctx if v in rep and rep[v] == v)
            images = tuple(rep[v] if k is None else k for v, k in zip(ctx, kinds))
            out.append(Substitution(dom, ctx, images))
    out.sort(key=lambda q: (len(q.dom), [expr_key(e, ctx) for e in q.images]))
    return tuple(out)


def factor_through(q: Substitution, f: Substitution) -> Optional[Substitution]:
    """Find ``r`` with ``q . r == f`` when ``q``'s domain names are fixed by
    ``q`` (true for quotient and critical substitutions); None if ``f`` does
    not factor."""
    if q.cod != f.cod:
        raise CubeError(f"cannot factor: {q.cod} != {f.cod}")
    assignment = {u: f[u] for u in q.dom}
    r = Substitution.make(f.dom, q.dom, assignment)
    for v, e in q.items():
        if r.apply(e) != f[v]:
            return None
    return r


def all_substitutions(dom: Sequence[str], cod: Sequence[str]) -> Iterator[Substitution]:
    """Every cube map ``dom -> cod`` (exponential; for small exhaustive checks)."""
    choices = (0, 1) + tuple(dom)
    for images in product(choices, repeat=len(cod)):
        yield Substitution(tuple(dom), tuple(cod), images)
