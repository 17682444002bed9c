"""The free extension of a presentation by extension structures on
iso-extensions (CAT) or on elements (SET), evaluated lazily through the
normalizer and the enumerator.

Besides the constructors this module provides the dimension-0 checks: the
external fragment (compared against an independent tower construction), the
weak-equivalence obligations for the inclusion, and sampled completeness
certificates built from the weak composition derivations in :mod:`rezk.kan`.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Any, Optional, Sequence

import networkx as nx

from . import cofib
from .cat import derive_wcoe_ob
from .certificates import REFL, Certificate
from .cofib import Cofibration
from .cube import Substitution
from .enumeration import Enumerator
from .kan import (IsoExtensionSpace, PRGInstance, ProviderFailure, SingletonSpace,
                  TruncationSpace, center_and_path, fibrancy_from_prg, problem_from_total,
                  set_instance, wcom_from_ext)
from .presentation import Presentation, set_presentation
from .report import FAIL, PASS, UNKNOWN, Report
from .rewrite import (BudgetExceeded, Normalizer, check_compatible, compose_iso,
                      default_budget, identity_iso, iso_laws_hold, sort_of)
from .sampling import (random_alpha, random_ctx, random_element, random_glue_line,
                       random_hom, random_object, random_partial_iso, random_set_problem)
from .terms import (Comp, ExtSet, Gen, GlueIsoFwd, GlueOb, IdHom, Inv, IsoTerm,
                    PartialElement, Term, TermError, ctx_of, is_base_term, show)


class NonPropositionalPiece(TermError):
    def __init__(self, conjunct, piece: Term, expected: Term):
        self.conjunct = conjunct
        self.piece = piece
        self.expected = expected
        super().__init__(f"piece on {conjunct} normalizes to {show(piece)}, "
                         f"but the morphism restricts to {show(expected)}")


@dataclass(eq=False)
class CompletionHandle:
    base: Presentation
    nz: Normalizer
    enumerator: Enumerator

    @property
    def theory(self) -> str:
        return self.base.theory

    def normalize(self, t: Term) -> Term:
        return self.nz.nf(t)

    def enumerate(self, sort: str, ctx: Sequence[str] = (), depth: int = 0) -> list:
        return self.enumerator.enumerate(sort, ctx, depth)

    def include(self, name: str, ctx: Sequence[str] = ()) -> Term:
        """The inclusion on a base generator is the generator itself."""
        if name in self.base.objects:
            return self.base.ob(name, ctx)
        return self.base.hom(name, ctx)


_HANDLES: dict = {}


def complete(p: Presentation) -> CompletionHandle:
    """The completion handle of ``p`` (one per presentation)."""
    key = (p, default_budget())
    h = _HANDLES.get(key)
    if h is None:
        nz = Normalizer(p, key[1])
        h = CompletionHandle(p, nz, Enumerator(p, nz))
        _HANDLES[key] = h
    return h


# ---------------------------------------------------------------------------
# constructors


def _check_pieces(x: Term, alpha: Cofibration, pieces: PartialElement) -> None:
    if pieces.ctx != ctx_of(x):
        raise TermError(f"pieces live over {pieces.ctx}, base over {ctx_of(x)}")
    if pieces.conjuncts != cofib.dnf(alpha, pieces.ctx):
        raise cofib.CofError("pieces do not match the cofibration")


def ext_ob(h: CompletionHandle, x: Term, alpha: Cofibration,
           pieces: PartialElement) -> tuple:
    """Extend a partial ``(y, e : x ~ y)`` on ``alpha`` to a total one."""
    _check_pieces(x, alpha, pieces)
    check_compatible(pieces, h.nz)
    g = GlueIsoFwd(x, pieces)
    sort_of(g, h.nz)
    return h.nz.nf(GlueOb(x, pieces)), IsoTerm(h.nz.nf(g), h.nz.nf(Inv(g)))


def ext_hom(h: CompletionHandle, f: Term, alpha: Cofibration,
            pieces: PartialElement) -> Term:
    """The unique extension of morphisms equal to ``f`` on ``alpha``: ``f``."""
    _check_pieces(f, alpha, pieces)
    for c, pl in pieces.pieces:
        q = cofib.quotient(c)
        want = h.nz.restrict_nf(f, q)
        got = h.nz.nf(pl)
        if got != want:
            raise NonPropositionalPiece(c, got, want)
    return h.nz.nf(f)


def ext_elt(h: CompletionHandle, x: Term, alpha: Cofibration,
            pieces: PartialElement) -> Term:
    _check_pieces(x, alpha, pieces)
    check_compatible(pieces, h.nz)
    return h.nz.nf(ExtSet(x, pieces))


def ess_surj_witness(h: CompletionHandle, ob: Term) -> tuple:
    """A base object and an iso from it to ``ob``."""
    match ob:
        case Gen(_, "ob", _):
            return ob, identity_iso(ob)
        case GlueOb(x, p):
            b, e = ess_surj_witness(h, x)
            g = GlueIsoFwd(x, p)
            iso = compose_iso(IsoTerm(g, Inv(g)), e)
            return b, IsoTerm(h.nz.nf(iso.fwd), h.nz.nf(iso.inv))
    raise TermError(f"not a normal object: {show(ob)}")


# ---------------------------------------------------------------------------
# externalization


@dataclass
class Fragment:
    """Normal forms at the empty context up to a depth, with composition."""

    depth: int
    objects: list
    homs: list
    ends: list
    composition: dict = field(default_factory=dict)

    def index(self, ob: Term) -> int:
        return self.objects.index(ob)

    def between(self, a: Term, b: Term) -> list:
        return [h for h, e in zip(self.homs, self.ends) if e == (a, b)]

    def graph(self, base: Presentation) -> nx.DiGraph:
        """Objects, with an edge for every generator and every glue iso;
        an edge is marked ``iso`` when the fragment contains an inverse."""
        g = nx.DiGraph()
        for k, o in enumerate(self.objects):
            g.add_node(k, label=show(o))
        homset = set(self.homs)
        nz = Normalizer(base)
        for hg in base.homs:
            if hg.src in base.objects and hg.dst in base.objects:
                a, b = base.ob(hg.src), base.ob(hg.dst)
                if a in self.objects and b in self.objects:
                    f = base.hom(hg.name)
                    iso = any(nz.nf(Comp(k, f)) == IdHom(a) and nz.nf(Comp(f, k)) == IdHom(b)
                              for k in self.between(b, a))
                    g.add_edge(self.index(a), self.index(b), iso=iso)
        for o in self.objects:
            if isinstance(o, GlueOb) and o.base in self.objects:
                gi = GlueIsoFwd(o.base, o.partial)
                g.add_edge(self.index(o.base), self.index(o), iso=True,
                           listed=gi in homset)
        return g

    def counts_by_depth(self) -> list:
        sizes = [_ob_size(o) for o in self.objects]
        return [sum(1 for s in sizes if s <= d) for d in range(self.depth + 1)]

    def to_json(self) -> dict:
        return {"depth": self.depth, "objects": [show(o) for o in self.objects],
                "homs": [{"hom": show(h), "src": show(a), "dst": show(b)}
                         for h, (a, b) in zip(self.homs, self.ends)],
                "overflow": sum(1 for v in self.composition.values() if v is None)}


def _ob_size(o: Term) -> int:
    if isinstance(o, GlueOb):
        return 1 + _ob_size(o.base)
    return 0


def externalize(h: CompletionHandle, depth: int, compose_table: bool = True) -> Fragment:
    """The completion at the empty context, up to ``depth``: every cofibration
    there is decided, so glue nodes either collapsed or carry no pieces."""
    if h.theory == "SET":
        objs = h.enumerate("elt", (), depth)
        return Fragment(depth, objs, [], [])
    objs = h.enumerate("ob", (), depth)
    homs = h.enumerate("hom", (), depth)
    for o in objs:
        if isinstance(o, GlueOb) and not o.partial.is_empty:
            raise AssertionError(f"undecided cofibration at the empty context: {show(o)}")
    ends = [h.enumerator.hom_ends(k) for k in homs]
    frag = Fragment(depth, objs, homs, [(h.nz.nf(a), h.nz.nf(b)) for a, b in ends])
    if compose_table:
        index = {k: n for n, k in enumerate(homs)}
        for n1, (k1, (a1, _)) in enumerate(zip(homs, frag.ends)):
            for n2, (k2, (_, b2)) in enumerate(zip(homs, frag.ends)):
                if b2 == a1:
                    frag.composition[(n1, n2)] = index.get(h.nz.nf(Comp(k1, k2)))
    return frag


def tower_oracle(objects: Sequence[str], arrows: Sequence[tuple], depth: int) -> nx.DiGraph:
    """Fibrant replacement at dimension 0 as a plain graph: stage 0 is the base
    (``arrows`` are ``(src, dst, iso)`` triples); stage ``d`` adjoins, for each
    object first added at stage ``d-1``, a fresh object with an iso from it."""
    g = nx.DiGraph()
    frontier = []
    for o in objects:
        g.add_node(("base", o), stage=0)
        frontier.append(("base", o))
    for src, dst, iso in arrows:
        g.add_edge(("base", src), ("base", dst), iso=bool(iso))
    for stage in range(1, depth + 1):
        new = []
        for o in frontier:
            fresh = ("fresh", o)
            g.add_node(fresh, stage=stage)
            g.add_edge(o, fresh, iso=True)
            new.append(fresh)
        frontier = new
    return g


def tower_counts(g: nx.DiGraph, depth: int) -> list:
    stages = [d for _, d in g.nodes(data="stage")]
    return [sum(1 for s in stages if s <= d) for d in range(depth + 1)]


def fragment_matches_oracle(frag: Fragment, oracle: nx.DiGraph, base: Presentation) -> bool:
    return nx.is_isomorphic(frag.graph(base), oracle,
                            edge_match=lambda a, b: a.get("iso") == b.get("iso"))


# ---------------------------------------------------------------------------
# weak equivalence at dimension 0


def _guard(rep: Report, id: str, kind: str, fn) -> None:
    try:
        status, witness = fn()
    except BudgetExceeded as e:
        status, witness = UNKNOWN, {"reason": str(e)}
    rep.add(id, kind, status, witness)


def verify_weq_dim0(h: CompletionHandle, depth: int) -> Report:
    """Bounded check that the inclusion of the base is split essentially
    surjective, full and faithful at the empty context."""
    rep = Report()
    if h.theory != "CAT":
        raise TermError("weak equivalence checks apply to CAT presentations")
    nz, base = h.nz, h.base
    with rep.timed("ess_surj"):
        for o in h.enumerate("ob", (), depth):
            def ess(o=o):
                b, e = ess_surj_witness(h, o)
                ok = (isinstance(b, Gen) and b.name in base.objects and iso_laws_hold(e, nz)
                      and sort_of(e.fwd, nz) == ("hom", b, o))
                return (PASS if ok else FAIL), {"base": show(b), "iso": show(e.fwd)}
            _guard(rep, f"ess_surj/{show(o)}", "ess_surj", ess)
    with rep.timed("full"):
        homs = h.enumerate("hom", (), depth)
        ends = [h.enumerator.hom_ends(k) for k in homs]
        base_obs = [base.ob(n) for n in base.objects]
        for a in base_obs:
            for b in base_obs:
                def full(a=a, b=b):
                    these = [k for k, e in zip(homs, ends) if e == (a, b)]
                    bad = [k for k in these if not is_base_term(nz.nf(k))]
                    if bad:
                        return FAIL, {"not_base": show(bad[0])}
                    return PASS, {"homs": len(these)}
                _guard(rep, f"full/{a.name}->{b.name}", "full", full)
    with rep.timed("faithful"):
        base_nz = Normalizer(base)
        base_homs = Enumerator(base, base_nz, glue=False).enumerate("hom", (), depth)
        def faithful():
            images = {}
            for k in base_homs:
                img = nz.nf(k)
                if not is_base_term(img) or img != base_nz.nf(k):
                    return FAIL, {"hom": show(k), "image": show(img)}
                if img in images:
                    return FAIL, {"homs": [show(images[img]), show(k)]}
                images[img] = k
            return PASS, {"homs": len(base_homs)}
        _guard(rep, "faithful/base", "faithful", faithful)
    return rep


# ---------------------------------------------------------------------------
# fibrancy instances for categories


def _coercions(nz: Normalizer) -> Any:
    cache: dict = {}

    def get(line: Term, z: str):
        key = (line, z)
        if key not in cache:
            cache[key] = derive_wcoe_ob(line, z, nz, check_pieces=False)
        return cache[key]
    return get


def cat_ob_instance(nz: Normalizer) -> PRGInstance:
    """Objects over the point: edges are isos, loops are isos equal to the identity."""
    coe = _coercions(nz)

    def fiber_wcoh(nz_, line, z, r):
        c = coe(line, z).coe(r, r)
        x = coe(line, z).at(r)
        if nz_.nf(c.fwd) != IdHom(x) or nz_.nf(c.inv) != IdHom(x):
            raise ProviderFailure("wcoh", f"wcoe^{{{r}->{r}}} is not the identity")
        return REFL

    return PRGInstance(
        "cat-ob",
        e_space=lambda nz_, b, a_e: IsoExtensionSpace(nz_, b),
        r_space=lambda nz_, b, a_r: SingletonSpace(nz_, ctx_of(b), (identity_iso(b), REFL),
                                                   "R_B"),
        fiber_wcoe=lambda nz_, line, z, r, s: coe(line, z).coe(r, s),
        fiber_wcoh=fiber_wcoh,
    )


def cat_hom_instance(nz: Normalizer) -> PRGInstance:
    """Morphisms over pairs of objects: over an edge ``(x_e, y_e)`` the only
    element is ``y_e . f . x_e^-1`` with reflexivity; over a reflexive loop the
    only element is ``(refl, refl)``."""
    coe = _coercions(nz)

    def e_space(nz_, b, a_e):
        xe, ye = a_e
        return SingletonSpace(nz_, ctx_of(b), (nz_.nf(Comp(ye.fwd, Comp(b, xe.inv))), REFL),
                              "E_B(hom)")

    def r_space(nz_, b, a_r):
        for e in a_r:
            s = sort_of(e.fwd, nz_)
            if nz_.nf(e.fwd) != IdHom(s[1]) or nz_.nf(e.inv) != IdHom(s[1]):
                raise ProviderFailure("R_B(hom)", "reflexive loop is not the identity")
        return SingletonSpace(nz_, ctx_of(b), (REFL, REFL), "R_B(hom)")

    def fiber_wcoe(nz_, line, z, r, s):
        _, x, y = sort_of(line, nz_)
        wx, wy = coe(x, z), coe(y, z)
        J = wx.level_ctx(r, s)
        lhs = Comp(wy.coe(r, s, J).fwd, nz_.restrict_nf(line, wx.level(r, J)))
        rhs = Comp(nz_.restrict_nf(line, wx.level(s, J)), wx.coe(r, s, J).fwd)
        if nz_.nf(lhs) != nz_.nf(rhs):
            raise ProviderFailure("wcoe(hom)", f"square fails at r:={r}, s:={s}")
        return REFL

    def base_wcoe(nz_, a_line, z, r, s):
        return tuple(coe(o, z).coe(r, s) for o in a_line)

    def base_wcoh(nz_, a_line, z, r):
        return tuple(coe(o, z).coe(r, r) for o in a_line)

    return PRGInstance("cat-hom", e_space, r_space, fiber_wcoe,
                       lambda nz_, line, z, r: REFL, base_wcoe, base_wcoh)


# ---------------------------------------------------------------------------
# completeness


def _cert_status(cert: Certificate) -> tuple:
    if cert.passed:
        return PASS, None
    return FAIL, cert.first_failure()


def _levels(rng: random.Random, ctx: tuple) -> tuple:
    r = rng.choice([0, 1] + list(ctx))
    s = rng.choice([0, 1] + list(ctx) + ["s"])
    return r, s


def _boundary_cert(h: CompletionHandle, x: Term, pieces: PartialElement, ext: tuple) -> Certificate:
    nz = h.nz
    cert = Certificate()
    y, e = ext
    for c, (py, pe) in pieces.pieces:
        q = cofib.quotient(c)
        cert.check("ext_ob object on the piece", q, nz.restrict_nf(y, q), py, nz)
        cert.check("ext_ob iso on the piece", q, nz.restrict_nf(e.fwd, q), pe.fwd, nz)
        cert.check("ext_ob inverse on the piece", q, nz.restrict_nf(e.inv, q), pe.inv, nz)
    cert.check("ext_ob iso law (source)", "total", Comp(e.inv, e.fwd), IdHom(x), nz)
    cert.check("ext_ob iso law (target)", "total", Comp(e.fwd, e.inv), IdHom(y), nz)
    return cert


def verify_completeness(h: CompletionHandle, samples: int = 100, seed: int = 0,
                        max_dims: int = 2, certificates: Optional[list] = None) -> Report:
    """Sampled certificates: extensions extend their pieces, any two
    extensions are joined by a path, and weak composition derived from the
    coercion data certifies for objects and morphisms (or elements)."""
    rep = Report()
    rng = random.Random(seed)
    nz = h.nz
    keep = certificates if certificates is not None else []

    def record(id: str, kind: str, make) -> None:
        def run():
            cert = make()
            keep.append(cert)
            return _cert_status(cert)
        _guard(rep, id, kind, run)

    with rep.timed("samples"):
        if h.theory == "SET":
            _sample_set(h, rng, samples, max_dims, record)
        else:
            ob_inst, hom_inst = cat_ob_instance(nz), cat_hom_instance(nz)
            for k in range(samples):
                _sample_cat(h, rng, k, max_dims, record, ob_inst, hom_inst)
    return rep


def _sample_cat(h, rng, k, max_dims, record, ob_inst, hom_inst) -> None:
    nz, P = h.nz, h.base
    ctx = random_ctx(rng, max_dims, ("i", "j"))
    x = random_object(rng, P, ctx, 1, nz)
    a1, a2 = random_alpha(rng, ctx), random_alpha(rng, ctx)
    p1 = random_partial_iso(rng, P, x, ctx, 1, nz, a1)
    p2 = random_partial_iso(rng, P, x, ctx, 1, nz, a2)
    tag = f"sample{k:03d}"
    e1 = ext_ob(h, x, a1, p1)
    e2 = ext_ob(h, x, a2, p2)
    record(f"{tag}/ext_ob", "ext_ob", lambda: _boundary_cert(h, x, p1, e1))
    record(f"{tag}/path", "path",
           lambda: center_and_path(IsoExtensionSpace(nz, x), e1, e2).certificate)
    K = ctx + ("z",)
    r, s = _levels(rng, ctx)
    line = random_glue_line(rng, P, ctx, "z", 2, nz)
    prob = problem_from_total(ctx, r, s, random_alpha(rng, ctx), line, "z", nz=nz)
    record(f"{tag}/wcom_ob", "wcom_ob", lambda: fibrancy_from_prg(ob_inst, prob, nz).certificate)
    xl = random_glue_line(rng, P, ctx, "z", 2, nz)
    f = random_hom(rng, P, xl, K, 1, nz)
    yl = sort_of(f, nz)[2]
    r, s = _levels(rng, ctx)
    hprob = problem_from_total(ctx, r, s, random_alpha(rng, ctx), f, "z", nz=nz,
                               base_line=(xl, yl))
    record(f"{tag}/wcom_hom", "wcom_hom",
           lambda: fibrancy_from_prg(hom_inst, hprob, nz).certificate)


def _sample_set(h, rng, samples, max_dims, record) -> None:
    nz, P = h.nz, h.base
    inst = set_instance()
    for k in range(samples):
        tag = f"sample{k:03d}"
        ctx = random_ctx(rng, max_dims, ("i", "j"))
        a = random_element(rng, P, ctx, 1, nz)
        b = random_element(rng, P, ctx, 1, nz)
        record(f"{tag}/path", "path",
               lambda: center_and_path(TruncationSpace(nz, a), a, b).certificate)
        prob = random_set_problem(rng, P, max_dims, nz)
        record(f"{tag}/wcom", "wcom", lambda: wcom_from_ext(prob, nz).certificate)
        record(f"{tag}/wcom_prg", "wcom_prg",
               lambda: fibrancy_from_prg(inst, prob, nz).certificate)


# ---------------------------------------------------------------------------
# the truncation demo


@dataclass
class TruncationDemo:
    path: Term
    dim: str
    endpoints: tuple
    report: Report
    certificates: list


def truncation_demo(elements: Sequence[str] = ("a", "b"), depth: int = 1,
                    problems: int = 200, seed: int = 0, max_dims: int = 2) -> TruncationDemo:
    """Path between the first two generators, paths between all pairs of
    global elements up to ``depth``, and certified weak composition on random
    filling problems."""
    h = complete(set_presentation(elements))
    nz, P = h.nz, h.base
    certs: list = []
    rep = Report()
    names = list(P.objects)
    a = P.ob(names[0])
    b = P.ob(names[1] if len(names) > 1 else names[0])
    cp = center_and_path(TruncationSpace(nz, a), a, b)
    certs.append(cp.certificate)
    ends = (nz.restrict_nf(cp.path, _face(cp.path_dim, 0)),
            nz.restrict_nf(cp.path, _face(cp.path_dim, 1)))
    rep.add("path/endpoints", "path", PASS if ends == (a, b) and cp.certificate.passed else FAIL,
            {"path": show(cp.path), "p(0)": show(ends[0]), "p(1)": show(ends[1])})
    with rep.timed("paths"):
        elts = h.enumerate("elt", (), depth)
        for u in elts:
            for v in elts:
                c = center_and_path(TruncationSpace(nz, u), u, v).certificate
                certs.append(c)
                rep.add(f"path/{show(u)}~{show(v)}", "path", *_cert_status(c))
    with rep.timed("wcom"):
        rng = random.Random(seed)
        inst = set_instance()
        for k in range(problems):
            prob = random_set_problem(rng, P, max_dims, nz)
            for kind, make in (("wcom", lambda: wcom_from_ext(prob, nz)),
                               ("wcom_prg", lambda: fibrancy_from_prg(inst, prob, nz))):
                def run(make=make):
                    cert = make().certificate
                    certs.append(cert)
                    return _cert_status(cert)
                _guard(rep, f"problem{k:03d}/{kind}", kind, run)
    return TruncationDemo(cp.path, cp.path_dim, ends, rep, certs)


def _face(dim: str, value: int) -> Substitution:
    return Substitution((), (dim,), (value,))


__all__ = [
    "CompletionHandle", "complete", "ext_ob", "ext_hom", "ext_elt", "ess_surj_witness",
    "NonPropositionalPiece", "Fragment", "externalize", "tower_oracle", "tower_counts",
    "fragment_matches_oracle", "verify_weq_dim0", "cat_ob_instance", "cat_hom_instance",
    "verify_completeness", "TruncationDemo", "truncation_demo",
]
