"""Weak coercion along object and morphism lines, and bounded checks of the
split classes of functors between finite presentations.

Coercion is derived by recursion on normal-form object lines: a generator is
constant in the line dimension and coerces by the identity; a glued object
``G = glue(x, ...)`` with glue iso ``g : x ~ G`` coerces by conjugation,
``g(s) . wcoe_x . g(r)^-1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional, Sequence

from . import cofib
from .certificates import Certificate
from .cube import IExpr, Substitution, fresh_name, is_const
from .enumeration import Enumerator
from .presentation import (BUILTIN, HomGen, Presentation, PresentationError, Rule,
                           load_presentation)
from .report import FAIL, PASS, UNKNOWN, Report
from .rewrite import Normalizer, atom_dst, atom_src, iso_laws_hold, sort_of
from .terms import (Comp, Gen, GlueIsoFwd, GlueOb, IdHom, Inv, IsoTerm, Restrict,
                    Term, TermError, ctx_of, show, word_atoms)


class WCoeError(TermError):
    pass


# ---------------------------------------------------------------------------
# object lines


@dataclass
class ObCoercion:
    """Weak coercion structure of an object line over ``ctx + (dim,)``."""

    line: Term
    dim: str
    nz: Normalizer
    inner: Optional["ObCoercion"] = None
    certificate: Certificate = field(default_factory=Certificate)

    @property
    def line_ctx(self) -> tuple:
        return ctx_of(self.line)

    @property
    def ctx(self) -> tuple:
        return tuple(v for v in self.line_ctx if v != self.dim)

    @property
    def coherent(self) -> bool:
        return self.certificate.passed

    def level_ctx(self, *levels: IExpr) -> tuple:
        """The context of ``coe(r, s)``: the line's parameters plus any generic levels."""
        out = self.ctx
        for e in levels:
            if not is_const(e) and e not in out:
                out = out + (e,)
        return out

    def level(self, e: IExpr, ctx: Sequence[str]) -> Substitution:
        L = self.line_ctx
        return Substitution(tuple(ctx), L, tuple(e if v == self.dim else v for v in L))

    def at(self, e: IExpr, ctx: Optional[Sequence[str]] = None) -> Term:
        ctx = self.level_ctx(e) if ctx is None else ctx
        return self.nz.restrict_nf(self.line, self.level(e, ctx))

    def coe(self, r: IExpr, s: IExpr, ctx: Optional[Sequence[str]] = None) -> IsoTerm:
        """``wcoe^{r->s}`` as an iso ``line(r) ~ line(s)`` (both components normal)."""
        J = self.level_ctx(r, s) if ctx is None else tuple(ctx)
        if self.inner is None:
            x = self.at(r, J)
            return IsoTerm(IdHom(x), IdHom(x))
        g = GlueIsoFwd(self.line.base, self.line.partial)
        gr, gs = Restrict(g, self.level(r, J)), Restrict(g, self.level(s, J))
        w = self.inner.coe(r, s, J)
        fwd = Comp(gs, Comp(w.fwd, Inv(gr)))
        inv = Comp(gr, Comp(w.inv, Inv(gs)))
        return IsoTerm(self.nz.nf(fwd), self.nz.nf(inv))


def _generic_levels(avoid: Sequence[str]) -> tuple:
    r = fresh_name("r", avoid)
    s = fresh_name("s", tuple(avoid) + (r,))
    return r, s


def derive_wcoe_ob(line: Term, dim: str, nz: Optional[Normalizer] = None,
                   check_pieces: bool = True) -> ObCoercion:
    """Derive (and certify) the weak coercion structure of a normal object line."""
    nz = nz or Normalizer()
    if dim not in ctx_of(line):
        raise WCoeError(f"line dimension {dim!r} not in {ctx_of(line)}")
    if nz.nf(line) != line:
        raise WCoeError(f"line is not in normal form: {show(line)}")
    match line:
        case Gen(_, "ob", _):
            out = ObCoercion(line, dim, nz)
        case GlueOb(x, _):
            out = ObCoercion(line, dim, nz, derive_wcoe_ob(x, dim, nz, check_pieces))
            out.certificate.extend(out.inner.certificate, "base: ")
        case _:
            raise WCoeError(f"unsupported object line head: {show(line)}")
    _certify_coherence(out)
    if out.inner is not None and check_pieces:
        _certify_restriction(out, nz)
    return out


def _certify_coherence(w: ObCoercion) -> None:
    cert, nz = w.certificate, w.nz
    r, s = _generic_levels(w.line_ctx)
    for e in (0, 1, r):
        c = w.coe(e, e)
        ident = IdHom(w.at(e))
        cert.check(f"wcoe^{{{e}->{e}}} = id", f"r:={e}", c.fwd, ident, nz)
        cert.check(f"wcoe^{{{e}->{e}}}^-1 = id", f"r:={e}", c.inv, ident, nz)
    J = w.level_ctx(r, s)
    c = w.coe(r, s)
    cert.check("wcoe^{r->s} inverse law (source)", "generic", Comp(c.inv, c.fwd),
               IdHom(w.at(r, J)), nz)
    cert.check("wcoe^{r->s} inverse law (target)", "generic", Comp(c.fwd, c.inv),
               IdHom(w.at(s, J)), nz)


def _certify_restriction(w: ObCoercion, nz: Normalizer) -> None:
    """On each conjunct of the glue cofibration the structure must agree with
    the one derived for the piece: by conjugation with the piece iso where the
    conjunct leaves the line dimension free, and with the identity at the
    fixed endpoint where it pins the line dimension."""
    cert, dim = w.certificate, w.dim
    I = w.ctx
    for c, (y, _iso) in w.line.partial.pieces:
        q = cofib.quotient(c)
        di = q[dim]
        if is_const(di):
            qI = Substitution(q.dom, I, tuple(q[v] for v in I))
            e = w.coe(di, di)
            x = nz.restrict_nf(w.at(di), qI)
            cert.check(f"on {c}: wcoe^{{{di}->{di}}} = id", qI,
                       Restrict(e.fwd, qI), IdHom(x), nz)
            continue
        if di != dim or any(q[v] == dim for v in I):
            cert.note("conjuncts identifying the line dimension with a parameter "
                      "are covered by the coherence and inverse-law checks")
            continue
        Q0 = tuple(v for v in q.dom if v != dim)
        wy = derive_wcoe_ob(y, dim, nz)
        cert.extend(wy.certificate, f"piece {c}: ")
        r, s = _generic_levels(w.line_ctx + q.dom)
        for a, b in ((r, s), (0, 1), (1, 0), (r, 0), (1, s)):
            J = w.level_ctx(a, b)
            J0 = Q0 + tuple(v for v in J if v not in I)
            qJ = Substitution(J0, J, tuple(q[v] if v in I else v for v in J))
            mine = w.coe(a, b, J)
            theirs = wy.coe(a, b, J0)
            where = f"{c}, r:={a}, s:={b}"
            cert.check("restricts to the piece's wcoe", where, Restrict(mine.fwd, qJ),
                       theirs.fwd, nz)
            cert.check("restricts to the piece's wcoe (inverse)", where,
                       Restrict(mine.inv, qJ), theirs.inv, nz)


def check_naturality(w: ObCoercion, f: Substitution) -> Certificate:
    """Restricting the derived structure along ``f : K -> ctx`` agrees with the
    structure derived for the restricted line."""
    nz, cert = w.nz, Certificate()
    if f.cod != w.ctx:
        raise WCoeError(f"substitution into {f.cod}, expected {w.ctx}")
    dim = fresh_name(w.dim, f.dom) if w.dim in f.dom else w.dim
    lift = Substitution(f.dom + (dim,), w.line_ctx,
                        tuple(dim if v == w.dim else f[v] for v in w.line_ctx))
    wf = derive_wcoe_ob(nz.restrict_nf(w.line, lift), dim, nz, check_pieces=False)
    r, s = _generic_levels(w.line_ctx + f.dom + (dim,))
    for a, b in ((r, s), (0, 1), (1, 0)):
        J = w.level_ctx(a, b)
        extra = tuple(v for v in J if v not in w.ctx)
        fJ = Substitution(f.dom + extra, J, tuple(f[v] if v in w.ctx else v for v in J))
        mine, theirs = w.coe(a, b, J), wf.coe(a, b, f.dom + extra)
        cert.check("naturality", f"{f}, r:={a}, s:={b}", Restrict(mine.fwd, fJ), theirs.fwd, nz)
        cert.check("naturality (inverse)", f"{f}, r:={a}, s:={b}",
                   Restrict(mine.inv, fJ), theirs.inv, nz)
    return cert


# ---------------------------------------------------------------------------
# morphism lines


def _hom_ends(h: Term, nz: Normalizer) -> tuple:
    s = sort_of(h, nz)
    if not isinstance(s, tuple):
        raise WCoeError(f"not a morphism: {show(h)}")
    return s[1], s[2]


def _square(cert: Certificate, label: str, h: Term, src: ObCoercion, dst: ObCoercion,
            pairs: Sequence[tuple], nz: Normalizer) -> None:
    for a, b in pairs:
        J = src.level_ctx(a, b)
        ha = Restrict(h, src.level(a, J))
        hb = Restrict(h, src.level(b, J))
        lhs = Comp(dst.coe(a, b, J).fwd, ha)
        rhs = Comp(hb, src.coe(a, b, J).fwd)
        cert.check(label, f"r:={a}, s:={b}", lhs, rhs, nz)


def derive_wcoe_hom(line: Term, dim: str, src: Optional[ObCoercion] = None,
                    dst: Optional[ObCoercion] = None,
                    nz: Optional[Normalizer] = None) -> Certificate:
    """Certify ``wcoe_dst^{r->s} . f(r) = f(s) . wcoe_src^{r->s}`` for a morphism
    line, atom by atom and for the whole composite."""
    nz = nz or Normalizer()
    h = nz.nf(line)
    x, y = _hom_ends(h, nz)
    src = src or derive_wcoe_ob(x, dim, nz)
    dst = dst or derive_wcoe_ob(y, dim, nz)
    if src.line != x or dst.line != y:
        raise WCoeError("coercion structures do not match the line's endpoints")
    cert = Certificate()
    r, s = _generic_levels(ctx_of(h))
    pairs = ((r, s), (0, 1), (1, 0), (r, r))
    if isinstance(h, IdHom):
        cert.note("identity line: the square is reflexivity")
        _square(cert, "identity square", h, src, dst, pairs, nz)
        return cert
    atoms = word_atoms(h)
    structs = {x: src, y: dst}
    for k, a in reversed(list(enumerate(atoms))):
        a0, a1 = nz.nf(atom_src(a)), nz.nf(atom_dst(a))
        for o in (a0, a1):
            if o not in structs:
                structs[o] = derive_wcoe_ob(o, dim, nz, check_pieces=False)
        _square(cert, f"atom {k} square", a, structs[a0], structs[a1], pairs, nz)
    _square(cert, "composite square", h, src, dst, pairs, nz)
    return cert


# ---------------------------------------------------------------------------
# functors between presentations


@dataclass(frozen=True)
class Functor:
    """Generator-level functor; each hom goes to a word of target homs
    (composition order, empty for an identity)."""

    source: Presentation
    target: Presentation
    ob_map: dict
    hom_map: dict
    name: str = ""

    def __post_init__(self):
        S, T = self.source, self.target
        if S.theory != "CAT" or T.theory != "CAT":
            raise PresentationError("functors are between CAT presentations")
        for o in S.objects:
            if self.ob_map.get(o) not in T.objects:
                raise PresentationError(f"object {o} has no image in the target")
        for hg in S.homs:
            word = tuple(self.hom_map.get(hg.name, ()))
            if hg.name not in self.hom_map:
                raise PresentationError(f"hom {hg.name} has no image in the target")
            want = (self.ob_map[hg.src], self.ob_map[hg.dst])
            ends = (want[0], want[0]) if not word else T._word_ends(word, f"image of {hg.name}")
            if ends != want:
                raise PresentationError(f"image of {hg.name} goes {ends[0]} -> {ends[1]}, "
                                        f"expected {want[0]} -> {want[1]}")

    def ob(self, t: Term) -> Term:
        return self.target.ob(self.ob_map[t.name], ctx_of(t))

    def apply(self, t: Term) -> Term:
        """Image of a base term (generators, identities, composites)."""
        match t:
            case Gen(n, "ob", _):
                return self.ob(t)
            case Gen(n, ("hom", s, _), _):
                return self.target.word(self.hom_map[n], ctx_of(t), src=self.ob_map[s])
            case IdHom(x):
                return IdHom(self.apply(x))
            case Comp(a, b):
                return Comp(self.apply(a), self.apply(b))
        raise TermError(f"functor images are defined on base terms only: {show(t)}")

    def preserves_rules(self, nz: Normalizer) -> list:
        bad = []
        for rule in self.source.rules:
            lhs = self.apply(self.source.word(rule.lhs))
            rhs = self.apply(self.source.word(rule.rhs, src=rule.src))
            if nz.nf(lhs) != nz.nf(rhs):
                bad.append(str(rule))
        return bad


def identity_functor(p: Presentation) -> Functor:
    return Functor(p, p, {o: o for o in p.objects}, {h.name: (h.name,) for h in p.homs},
                   f"id_{p.name}")


def inclusion(source: Presentation, target: Presentation) -> Functor:
    """Name-preserving functor (every generator of ``source`` exists in ``target``)."""
    return Functor(source, target, {o: o for o in source.objects},
                   {h.name: (h.name,) for h in source.homs},
                   f"{source.name}->{target.name}")


def parse_functor(text: str, base_dir: Optional[Path] = None, source: str = "<string>") -> Functor:
    """Text format::

        source walking_arrow        # built-in name or .pres path
        target walking_iso
        x -> x
        f -> g.f                    # words in composition order; id for identities
    """
    pres: dict = {}
    obs, homs = {}, {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head = line.split(None, 1)
        if head[0] in ("source", "target") and len(head) == 2:
            ref = head[1].strip()
            if ref in BUILTIN:
                pres[head[0]] = BUILTIN[ref]()
            else:
                path = Path(ref) if base_dir is None else base_dir / ref
                try:
                    pres[head[0]] = load_presentation(path)
                except OSError as e:
                    raise PresentationError(f"cannot read {ref}: {e}", lineno, source) from None
            continue
        if "->" not in line:
            raise PresentationError(f"expected 'name -> image', got {line!r}", lineno, source)
        if "source" not in pres or "target" not in pres:
            raise PresentationError("source and target must come first", lineno, source)
        lhs, rhs = (p.strip() for p in line.split("->", 1))
        if lhs in pres["source"].objects:
            obs[lhs] = rhs
        elif lhs in pres["source"].hom_table:
            homs[lhs] = () if rhs == "id" else tuple(p.strip() for p in rhs.split("."))
        else:
            raise PresentationError(f"unknown source generator {lhs!r}", lineno, source)
    if "source" not in pres or "target" not in pres:
        raise PresentationError("missing source or target line", None, source)
    try:
        return Functor(pres["source"], pres["target"], obs, homs, Path(source).stem)
    except PresentationError as e:
        raise PresentationError(e.message, None, source) from None


def load_functor(path: str | Path) -> Functor:
    path = Path(path)
    return parse_functor(path.read_text(), path.parent, str(path))


# ---------------------------------------------------------------------------
# bounded split-class checks


class _Side:
    """Base homs of one presentation, grouped by endpoints, up to a depth."""

    def __init__(self, pres: Presentation, depth: int):
        self.pres = pres
        self.nz = Normalizer(pres)
        self.en = Enumerator(pres, self.nz, glue=False)
        self.depth = depth
        self.obs = list(pres.objects)
        self.homs: dict = {}
        for h in self.en.enumerate("hom", (), depth):
            a, b = self.en.hom_ends(h)
            self.homs.setdefault((a.name, b.name), []).append(h)
        # nf words are closed under subwords, so no words of one length
        # means no longer ones either
        self.saturated = not self.en._chains((), depth + 1)

    def between(self, a: str, b: str) -> list:
        return self.homs.get((a, b), [])

    def isos_from(self, a: str) -> list:
        out = []
        for b in self.obs:
            for f in self.between(a, b):
                for g in self.between(b, a):
                    if iso_laws_hold(IsoTerm(f, g), self.nz):
                        out.append((b, IsoTerm(f, g)))
        return out


def _miss(saturated: bool) -> str:
    return FAIL if saturated else UNKNOWN


def check_split_classes(F: Functor, depth: int) -> Report:
    """Bounded dimension-0 check of the lifting conditions defining split weak
    equivalences, split trivial fibrations and split fibrations.

    Obligation kinds: ``functor`` (rules preserved), ``ess_surj``,
    ``ob_surj``, ``full``, ``faithful`` and ``iso_lift``.  A missing witness is
    a failure only when the relevant enumeration is exhaustive; otherwise it
    is ``unknown``."""
    rep = Report()
    S, T = _Side(F.source, depth), _Side(F.target, depth)
    fnf = lambda t: T.nz.nf(F.apply(t))
    with rep.timed("check"):
        bad = F.preserves_rules(T.nz)
        rep.add("functor/rules", "functor", FAIL if bad else PASS,
                {"violated": bad} if bad else None)
        for y in T.obs:
            pre = [a for a in S.obs if F.ob_map[a] == y]
            rep.add(f"ob_surj/{y}", "ob_surj", PASS if pre else FAIL,
                    {"preimage": pre[0]} if pre else None)
            found = None
            for a in S.obs:
                for b, e in T.isos_from(F.ob_map[a]):
                    if b == y:
                        found = {"source": a, "iso": show(e.fwd), "inverse": show(e.inv)}
                        break
                if found:
                    break
            rep.add(f"ess_surj/{y}", "ess_surj", PASS if found else _miss(T.saturated), found)
        for a in S.obs:
            for b in S.obs:
                lifts = {}
                for k in S.between(a, b):
                    lifts.setdefault(fnf(k), k)
                missing = [h for h in T.between(F.ob_map[a], F.ob_map[b]) if h not in lifts]
                rep.add(f"full/{a}->{b}", "full", _miss(S.saturated) if missing else PASS,
                        {"unlifted": show(missing[0])} if missing else None)
                seen, clash = {}, None
                for k in S.between(a, b):
                    img = fnf(k)
                    if img in seen:
                        clash = {"homs": [show(seen[img]), show(k)], "image": show(img)}
                        break
                    seen[img] = k
                rep.add(f"faithful/{a}->{b}", "faithful", FAIL if clash else PASS, clash)
        for a in S.obs:
            src_isos = S.isos_from(a)
            for y, e in T.isos_from(F.ob_map[a]):
                lift = next((show(e2.fwd) for b, e2 in src_isos
                             if F.ob_map[b] == y and fnf(e2.fwd) == e.fwd), None)
                rep.add(f"iso_lift/{a}/{show(e.fwd)}", "iso_lift",
                        PASS if lift else _miss(S.saturated),
                        {"lift": lift} if lift else {"target_iso": show(e.fwd)})
    rep.extra["classes"] = classify(rep)
    return rep


CLASSES = {
    "weak_equivalence": ("functor", "ess_surj", "full", "faithful"),
    "trivial_fibration": ("functor", "ob_surj", "full", "faithful"),
    "fibration": ("functor", "iso_lift"),
}


def classify(rep: Report) -> dict:
    out = {}
    for name, kinds in CLASSES.items():
        statuses = {rep.status_of(k) for k in kinds}
        out[name] = FAIL if FAIL in statuses else UNKNOWN if UNKNOWN in statuses else PASS
    return out


# ---------------------------------------------------------------------------
# reflexive loops


def refl_loop(p: Presentation, depth: int = 2) -> Functor:
    """The projection ``pi`` from reflexive loops of ``p`` to ``p``.

    An object is ``(x, x_e, x_r)`` with ``x_e : x ~ x`` and ``x_r`` a proof that
    ``x_e = id``; a morphism is ``f`` with a proof of ``f . x_e = y_e . f``.
    Loops are searched among normal forms up to ``depth``; since equality of
    morphisms is judgmental, the proofs are the normal-form checks below."""
    side = _Side(p, depth)
    objects, loops = [], {}
    for x in p.objects:
        for b, e in side.isos_from(x):
            if b == x and side.nz.nf(e.fwd) == IdHom(p.ob(x)):
                name = f"{x}_rl"
                objects.append(name)
                loops[x] = e
    homs, hom_map = [], {}
    for h in p.homs:
        if h.src in loops and h.dst in loops:
            f = p.hom(h.name)
            lhs = Comp(f, loops[h.src].fwd)
            rhs = Comp(loops[h.dst].fwd, f)
            if side.nz.nf(lhs) == side.nz.nf(rhs):
                homs.append(HomGen(f"{h.name}_rl", f"{h.src}_rl", f"{h.dst}_rl"))
                hom_map[f"{h.name}_rl"] = (h.name,)
    names = {hg.name[:-3]: hg.name for hg in homs}
    rules = tuple(Rule(tuple(names[n] for n in r.lhs), tuple(names[n] for n in r.rhs),
                       f"{r.src}_rl", f"{r.dst}_rl")
                  for r in p.rules if all(n in names for n in r.lhs + r.rhs))
    total = Presentation("CAT", tuple(objects), tuple(homs), rules, f"reflloop_{p.name}")
    return Functor(total, p, {o: o[:-3] for o in objects}, hom_map, f"pi_{p.name}")


__all__ = [
    "ObCoercion", "WCoeError", "derive_wcoe_ob", "derive_wcoe_hom", "check_naturality",
    "Functor", "identity_functor", "inclusion", "parse_functor", "load_functor",
    "check_split_classes", "classify", "refl_loop", "CLASSES",
]
