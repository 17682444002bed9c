"""Terms of the free cubical algebras: sets and categories extended with
extension-structure constructors.

A term lives over a dimension context which can always be recovered from it
(:func:`ctx_of`).  Partial elements are stored per canonical DNF conjunct;
each payload lives over the quotient context of its conjunct.
"""

from __future__ import annotations

import contextvars
from dataclasses import dataclass, fields
from typing import Any, Callable, Iterator, Optional, Sequence

from . import cofib
from .cube import (CubeError, Substitution, check_ctx, compose,
                   factor_through, projection)


class TermError(ValueError):
    """Ill-formed or ill-sorted term."""


_RECORDER: contextvars.ContextVar = contextvars.ContextVar("rezk_glue_recorder", default=None)


class Term:
    """Base of all term nodes: structural equality with a cached hash."""

    __slots__ = ()

    def _key(self) -> tuple:
        return tuple(getattr(self, n) for n in type(self)._field_names())

    @classmethod
    def _field_names(cls) -> tuple:
        names = cls.__dict__.get("_cached_names")
        if names is None:
            names = tuple(f.name for f in fields(cls))
            cls._cached_names = names
        return names

    def __hash__(self) -> int:
        h = self.__dict__.get("_h")
        if h is None:
            h = hash((type(self).__name__,) + self._key())
            object.__setattr__(self, "_h", h)
        return h

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if type(self) is not type(other) or hash(self) != hash(other):
            return False
        return self._key() == other._key()

    def __ne__(self, other: object) -> bool:
        return not self == other

    def __str__(self) -> str:
        return show(self)


@dataclass(frozen=True, eq=False)
class Gen(Term):
    """A generator restricted along ``sub : ctx -> (generator's own context)``.

    ``sort`` is ``"ob"``, ``"elt"`` or ``("hom", src, dst)`` with generator
    names as endpoints."""

    name: str
    sort: Any
    sub: Substitution


@dataclass(frozen=True, eq=False)
class IdHom(Term):
    ob: Term


@dataclass(frozen=True, eq=False)
class Comp(Term):
    """``left . right`` (apply ``right`` first)."""

    left: Term
    right: Term


@dataclass(frozen=True, eq=False)
class Inv(Term):
    arg: Term


@dataclass(frozen=True)
class IsoTerm:
    fwd: Term
    inv: Term

    def __str__(self) -> str:
        return f"<{show(self.fwd)} | {show(self.inv)}>"


@dataclass(frozen=True, eq=False)
class PartialElement:
    """``[C1 -> p1, ..., Cn -> pn]`` over ``ctx`` with canonical conjuncts."""

    ctx: tuple
    pieces: tuple

    def __hash__(self) -> int:
        h = self.__dict__.get("_h")
        if h is None:
            h = hash((self.ctx, self.pieces))
            object.__setattr__(self, "_h", h)
        return h

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, PartialElement) or hash(self) != hash(other):
            return False
        return self.ctx == other.ctx and self.pieces == other.pieces

    @property
    def conjuncts(self) -> tuple:
        return tuple(c for c, _ in self.pieces)

    @property
    def cof(self) -> cofib.Cofibration:
        return cofib.from_conjuncts(self.conjuncts)

    @property
    def decided(self) -> bool:
        return cofib.is_decided_dnf(self.conjuncts)

    @property
    def is_empty(self) -> bool:
        return not self.pieces

    def payloads(self) -> tuple:
        return tuple(p for _, p in self.pieces)


class _Glue(Term):
    """Shared behaviour of the three extension-structure nodes."""

    __slots__ = ()
    kind = ""

    def __post_init__(self):
        rec = _RECORDER.get()
        if rec is not None:
            rec.append(self)


@dataclass(frozen=True, eq=False)
class GlueOb(_Glue):
    """Object component of ``ext_Ob(base)``; payloads are ``(ob, IsoTerm)``."""

    base: Term
    partial: PartialElement
    kind = "ob"


@dataclass(frozen=True, eq=False)
class GlueIsoFwd(_Glue):
    """Forward map ``base -> GlueOb(base, partial)`` of the glue isomorphism."""

    base: Term
    partial: PartialElement
    kind = "iso"


@dataclass(frozen=True, eq=False)
class ExtSet(_Glue):
    """The free extension ``ext(base, partial)`` of a set; payloads are terms."""

    base: Term
    partial: PartialElement
    kind = "ext"


@dataclass(frozen=True, eq=False)
class Restrict(Term):
    term: Term
    sub: Substitution


GLUE_TYPES = (GlueOb, GlueIsoFwd, ExtSet)


class record_glue_nodes:
    """Context manager collecting every glue/ext node constructed inside it."""

    def __init__(self, sink: Optional[list] = None):
        self.nodes = [] if sink is None else sink
        self._token = None

    def __enter__(self) -> list:
        self._token = _RECORDER.set(self.nodes)
        return self.nodes

    def __exit__(self, *exc) -> None:
        _RECORDER.reset(self._token)


# ---------------------------------------------------------------------------
# generators and basic constructors


def gen(name: str, sort: Any = "elt", ctx: Sequence[str] = (),
        sub: Optional[Substitution] = None) -> Gen:
    """A 0-dimensional generator weakened to ``ctx`` (or restricted along ``sub``)."""
    if sub is None:
        sub = Substitution(check_ctx(ctx), (), ())
    return Gen(name, sort, sub)


def hom_sort(src: str, dst: str) -> tuple:
    return ("hom", src, dst)


def is_hom_gen(t: Term) -> bool:
    return isinstance(t, Gen) and isinstance(t.sort, tuple)


def ctx_of(t: Term) -> tuple:
    match t:
        case Gen(_, _, sub):
            return sub.dom
        case IdHom(x):
            return ctx_of(x)
        case Comp(a, _):
            return ctx_of(a)
        case Inv(h):
            return ctx_of(h)
        case Restrict(_, f):
            return f.dom
        case GlueOb(_, p) | GlueIsoFwd(_, p) | ExtSet(_, p):
            return p.ctx
    raise TermError(f"not a term: {t!r}")


def payload_ctx(payload: Any) -> tuple:
    if isinstance(payload, Term):
        return ctx_of(payload)
    return ctx_of(payload[0])


def map_payload(payload: Any, fn: Callable[[Term], Term]) -> Any:
    """Apply ``fn`` to every term inside a payload (term or ``(ob, IsoTerm)``)."""
    if isinstance(payload, Term):
        return fn(payload)
    ob, iso = payload
    return (fn(ob), IsoTerm(fn(iso.fwd), fn(iso.inv)))


def payload_terms(payload: Any) -> tuple:
    if isinstance(payload, Term):
        return (payload,)
    ob, iso = payload
    return (ob, iso.fwd, iso.inv)


def collapse_component(node: _Glue, payload: Any) -> Term:
    """The value a glue/ext node takes where its cofibration holds."""
    match node:
        case GlueOb():
            return payload[0]
        case GlueIsoFwd():
            return payload[1].fwd
        case ExtSet():
            return payload
    raise TermError(f"not a glue node: {node!r}")


def glue_dst(node: GlueIsoFwd) -> GlueOb:
    return GlueOb(node.base, node.partial)


# ---------------------------------------------------------------------------
# structural restriction


def restrict_partial_raw(p: PartialElement, f: Substitution,
                         wrap: Callable[[Term, Substitution], Term]) -> PartialElement:
    """``p[f]``: recompute the conjuncts of the restricted cofibration; each new
    payload is the first matching old payload transported by ``wrap``."""
    if p.ctx != f.cod:
        raise CubeError(f"partial element over {p.ctx} restricted along map into {f.cod}")
    if f.is_identity:
        return p
    new_pieces = []
    for c2 in cofib.restrict_conjuncts(p.conjuncts, f):
        h = compose(f, cofib.quotient(c2))
        for c, payload in p.pieces:
            r = factor_through(cofib.quotient(c), h)
            if r is not None:
                new_pieces.append((c2, map_payload(payload, lambda t, r=r: wrap(t, r))))
                break
        else:  # pragma: no cover - excluded by construction of restrict_conjuncts
            raise TermError(f"no piece covers conjunct {c2}")
    return PartialElement(f.dom, tuple(new_pieces))


def _lazy(t: Term, r: Substitution) -> Term:
    return t if r.is_identity else Restrict(t, r)


def restrict(t: Term, f: Substitution) -> Term:
    """Push ``f`` to the leaves: generators compose substitutions, glue/ext
    nodes restrict their cofibration and payloads, and a node whose restricted
    cofibration becomes decided collapses to its payload."""
    if ctx_of(t) != f.cod:
        raise CubeError(f"term over {ctx_of(t)} restricted along map into {f.cod}")
    return _push(t, f)


def _push(t: Term, f: Substitution) -> Term:
    if f.is_identity:
        return t
    match t:
        case Gen(n, s, sub):
            return Gen(n, s, compose(sub, f))
        case Restrict(u, g):
            return _push(u, compose(g, f))
        case IdHom(x):
            return IdHom(_push(x, f))
        case Comp(a, b):
            return Comp(_push(a, f), _push(b, f))
        case Inv(h):
            return _push_inv(h, f)
        case GlueOb(x, p) | GlueIsoFwd(x, p) | ExtSet(x, p):
            p2 = restrict_partial_raw(p, f, _push)
            if p2.decided:
                return collapse_component(t, p2.pieces[0][1])
            return type(t)(_push(x, f), p2)
    raise TermError(f"not a term: {t!r}")


def _push_inv(h: Term, f: Substitution) -> Term:
    """``Inv(h)[f]``, distributing the inverse so that glue isos collapsing to
    their payload are inverted by the payload's inverse."""
    match h:
        case GlueIsoFwd(x, p):
            p2 = restrict_partial_raw(p, f, _push)
            if p2.decided:
                return p2.pieces[0][1][1].inv
            return Inv(GlueIsoFwd(_push(x, f), p2))
        case Comp(a, b):
            return Comp(_push_inv(b, f), _push_inv(a, f))
        case Inv(k):
            return _push(k, f)
        case IdHom(x):
            return IdHom(_push(x, f))
        case Restrict(u, g):
            return _push_inv(u, compose(g, f))
    return Inv(_push(h, f))


def weaken_to(t: Term, ctx: Sequence[str]) -> Term:
    """View ``t`` in a larger context along the projection."""
    ctx = tuple(ctx)
    here = ctx_of(t)
    if here == ctx:
        return t
    return restrict(t, projection(ctx, here))


def subterms(t: Term) -> Iterator[Term]:
    """Pre-order traversal, including payload terms of glue nodes."""
    yield t
    match t:
        case IdHom(x) | Inv(x) | Restrict(x, _):
            yield from subterms(x)
        case Comp(a, b):
            yield from subterms(a)
            yield from subterms(b)
        case GlueOb(x, p) | GlueIsoFwd(x, p) | ExtSet(x, p):
            yield from subterms(x)
            for _, payload in p.pieces:
                for u in payload_terms(payload):
                    yield from subterms(u)


def glue_depth(t: Term) -> int:
    """Nesting depth of glue/ext constructors."""
    match t:
        case IdHom(x) | Inv(x) | Restrict(x, _):
            return glue_depth(x)
        case Comp(a, b):
            return max(glue_depth(a), glue_depth(b))
        case GlueOb(x, p) | GlueIsoFwd(x, p) | ExtSet(x, p):
            inner = [glue_depth(u) for _, pl in p.pieces for u in payload_terms(pl)]
            return 1 + max([glue_depth(x)] + inner)
    return 0


def node_count(t: Term) -> int:
    """Constructor nodes (generators count zero)."""
    match t:
        case Gen():
            return 0
        case IdHom(x) | Inv(x) | Restrict(x, _):
            return 1 + node_count(x)
        case Comp(a, b):
            return 1 + node_count(a) + node_count(b)
        case GlueOb(x, p) | GlueIsoFwd(x, p) | ExtSet(x, p):
            return 1 + node_count(x) + sum(node_count(u) for _, pl in p.pieces
                                           for u in payload_terms(pl))
    raise TermError(f"not a term: {t!r}")


def is_base_term(t: Term) -> bool:
    """Built from generators, identities and composition only."""
    match t:
        case Gen():
            return True
        case IdHom(x):
            return is_base_term(x)
        case Comp(a, b):
            return is_base_term(a) and is_base_term(b)
    return False


def word_atoms(t: Term) -> tuple:
    """Atoms of a right-associated composite (empty for identities)."""
    atoms = []
    while isinstance(t, Comp):
        atoms.append(t.left)
        t = t.right
    if not isinstance(t, IdHom):
        atoms.append(t)
    return tuple(atoms)


def compose_word(atoms: Sequence[Term], src: Optional[Term] = None) -> Term:
    if not atoms:
        if src is None:
            raise TermError("empty composite needs a source object")
        return IdHom(src)
    out = atoms[-1]
    for a in reversed(atoms[:-1]):
        out = Comp(a, out)
    return out


def comp(*homs: Term) -> Term:
    """``comp(a, b, c) = a . (b . c)``."""
    if not homs:
        raise TermError("comp needs at least one morphism")
    out = homs[-1]
    for h in reversed(homs[:-1]):
        out = Comp(h, out)
    return out


# ---------------------------------------------------------------------------
# printing


def show(t: Any) -> str:
    match t:
        case Gen(n, _, sub):
            return n if not sub.cod else f"{n}{sub}"
        case IdHom(x):
            return f"id({show(x)})"
        case Comp(a, b):
            return f"comp({show(a)}, {show(b)})"
        case Inv(h):
            return f"inv({show(h)})"
        case Restrict(u, f):
            return f"restrict({show(u)}, {f})"
        case GlueOb(x, p):
            return f"glue({show(x)}, {show_partial(p)})"
        case GlueIsoFwd(x, p):
            return f"gluei({show(x)}, {show_partial(p)})"
        case ExtSet(x, p):
            return f"ext({show(x)}, {show_partial(p)})"
        case IsoTerm():
            return str(t)
        case tuple():
            return "(" + ", ".join(show(u) for u in t) + ")"
    return repr(t)


def show_payload(payload: Any) -> str:
    if isinstance(payload, Term):
        return show(payload)
    ob, iso = payload
    return f"({show(ob)}, {show(iso.fwd)}, {show(iso.inv)})"


def show_partial(p: PartialElement) -> str:
    body = "; ".join(f"{cofib.show_cof(c.formula())} -> {show_payload(pl)}"
                     for c, pl in p.pieces)
    return f"[{body}]"


__all__ = [
    "Term", "Gen", "IdHom", "Comp", "Inv", "IsoTerm", "PartialElement",
    "GlueOb", "GlueIsoFwd", "ExtSet", "Restrict", "GLUE_TYPES", "TermError",
    "record_glue_nodes", "gen", "hom_sort", "is_hom_gen", "ctx_of",
    "restrict", "restrict_partial_raw", "weaken_to", "map_payload",
    "payload_terms", "collapse_component", "glue_dst", "subterms",
    "glue_depth", "node_count", "is_base_term", "word_atoms", "compose_word",
    "comp", "show", "show_partial", "show_payload",
]
