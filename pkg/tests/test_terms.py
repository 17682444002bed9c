import random

import pytest
from hypothesis import given, strategies as st

from rezk.cofib import BOT, TOP, dnf, parse_cof, quotient
from rezk.cube import Substitution, compose, parse_substitution
from rezk.presentation import (PresentationError, parse_presentation, set_presentation,
                               walking_arrow, walking_idempotent, walking_iso, walking_loop)
from rezk.rewrite import (STRATEGIES, BudgetExceeded, IncompatiblePieces, Normalizer,
                          SmallStep, boundary_violations, empty_partial, eq_terms,
                          iso_laws_hold, mk_partial, normalize, sort_of, system)
from rezk.sampling import random_term, random_triple
from rezk.syntax import TermSyntaxError, parse_term
from rezk.terms import (GLUE_TYPES, Comp, ExtSet, Gen, GlueIsoFwd, GlueOb, IdHom, Inv,
                        IsoTerm, Restrict, TermError, ctx_of, gen, record_glue_nodes,
                        restrict, show, subterms)

ISO = walking_iso()
NZ = Normalizer(ISO)


def T(text, ctx=(), pres=ISO):
    return parse_term(text, pres, ctx, NZ if pres is ISO else Normalizer(pres))


def sub(text, dom, cod):
    return parse_substitution(text, dom, cod)


# -- restriction ---------------------------------------------------------------

def test_restrict_generator_composes_substitutions():
    x = Gen("x", "ob", sub("{i:=j}", ("j",), ("i",)))
    out = restrict(x, sub("{j:=0}", (), ("j",)))
    assert out == Gen("x", "ob", sub("{i:=0}", (), ("i",)))


def test_restrict_glue_to_false_face_leaves_free_node():
    t = T("glue(x, [(i=0) -> (y, f, g)])", ("i",))
    out = NZ.nf(restrict(t, sub("{i:=1}", (), ("i",))))
    assert isinstance(out, GlueOb) and out.partial.is_empty and out.partial.cof == BOT


def test_restrict_glue_to_true_face_collapses():
    t = T("glue(x, [(i=0) -> (y, f, g)])", ("i",))
    assert NZ.nf(restrict(t, sub("{i:=0}", (), ("i",)))) == ISO.ob("y")
    fwd = T("gluei(x, [(i=0) -> (y, f, g)])", ("i",))
    assert NZ.nf(restrict(fwd, sub("{i:=0}", (), ("i",)))) == ISO.hom("f")
    assert NZ.nf(Restrict(Inv(fwd), sub("{i:=0}", (), ("i",)))) == ISO.hom("g")


def test_restrict_rejects_wrong_context():
    from rezk.cube import CubeError
    with pytest.raises(CubeError):
        restrict(ISO.ob("x", ("i",)), sub("{j:=0}", (), ("j",)))


# -- normalization -------------------------------------------------------------

def test_normalize_examples():
    f = ISO.hom("f")
    assert normalize(Comp(IdHom(ISO.ob("x")), f), ISO) == f
    e = GlueIsoFwd(ISO.ob("x"), empty_partial(()))
    assert normalize(Comp(Inv(e), e), ISO) == IdHom(ISO.ob("x"))
    t = T("glue(x, [(i=0) -> (y, f, g); (i=1) -> (x, id(x), id(x))])", ("i",))
    assert NZ.nf(Restrict(t, sub("{i:=0}", (), ("i",)))) == ISO.ob("y")
    assert NZ.nf(Restrict(t, sub("{i:=1}", (), ("i",)))) == ISO.ob("x")


def test_normal_forms_have_no_restrict_or_decided_glue():
    rng = random.Random(3)
    for _ in range(60):
        t = random_term(rng, ISO, ("i", "j"), 3, NZ)
        n = NZ.nf(t)
        for u in subterms(n):
            assert not isinstance(u, Restrict)
            if isinstance(u, GLUE_TYPES):
                assert not u.partial.decided


def test_inverse_calculus():
    f = T("gluei(x, [(i=0) -> (y, f, g)])", ("i",))
    assert NZ.nf(Inv(Inv(f))) == NZ.nf(f)
    x = ISO.ob("x", ("i",))
    assert NZ.nf(Inv(IdHom(x))) == IdHom(x)
    h = Comp(f, IdHom(x))
    assert NZ.nf(Comp(Inv(h), h)) == IdHom(x)


def test_eq_terms_examples():
    loop = walking_loop()
    l = loop.hom("l")
    assert eq_terms(Comp(l, Comp(l, Comp(l, l))), Comp(Comp(Comp(l, l), l), l), loop)
    s = set_presentation(["a", "b"])
    assert not eq_terms(s.ob("a"), s.ob("b"), s)
    assert eq_terms(T("comp(g, f)"), IdHom(ISO.ob("x")), ISO)
    assert not eq_terms(walking_arrow().hom("f"), IdHom(ISO.ob("x")))


def test_idempotent_rule():
    p = walking_idempotent()
    e = p.hom("e")
    assert normalize(Comp(e, Comp(e, e)), p) == e


def test_step_budget_exceeded():
    bad = parse_presentation("theory CAT\n[objects]\nx\n[homs]\nf : x -> x\n"
                             "[rules]\nf -> f.f\n")
    with pytest.raises(BudgetExceeded):
        Normalizer(bad, budget=200).nf(Comp(bad.hom("f"), bad.hom("f")))


def test_budget_from_environment(monkeypatch):
    monkeypatch.setenv("RF_STEP_BUDGET", "7")
    assert Normalizer(ISO).budget == 7


# -- partial elements ----------------------------------------------------------

def test_mk_partial_bot_is_empty():
    p = mk_partial(BOT, ("i",), [])
    assert p.is_empty and p.pieces == ()


def test_mk_partial_disjoint_faces():
    s = set_presentation(["a", "b"])
    p = mk_partial(parse_cof("(i=0) \\/ (i=1)"), ("i",), [s.ob("a"), s.ob("b")])
    assert len(p.pieces) == 2


def test_mk_partial_incompatible_diagonal():
    s = set_presentation(["a", "b"])
    alpha = parse_cof("(i=0) \\/ (i=j)")
    conjs = dnf(alpha, ("i", "j"))
    payloads = [s.ob(n, quotient(c).dom) for c, n in zip(conjs, ["a", "b"])]
    with pytest.raises(IncompatiblePieces) as info:
        mk_partial(alpha, ("i", "j"), payloads)
    m = info.value.meet
    assert m.dom == () and m["i"] == 0 and m["j"] == 0
    assert {info.value.nf1, info.value.nf2} == {s.ob("a"), s.ob("b")}


def test_mk_partial_compatible_diagonal():
    s = set_presentation(["a"])
    alpha = parse_cof("(i=0) \\/ (i=j)")
    conjs = dnf(alpha, ("i", "j"))
    payloads = [s.ob("a", quotient(c).dom) for c in conjs]
    assert len(mk_partial(alpha, ("i", "j"), payloads).pieces) == 2


def test_mk_partial_wrong_payload_count():
    with pytest.raises(TermError):
        mk_partial(TOP, (), [])


def test_system_checks_overlaps():
    s = set_presentation(["a", "b"])
    a, b = s.ob("a", ("i",)), s.ob("b", ("i",))
    system(("i",), [(parse_cof("(i=0)"), a), (parse_cof("(i=1)"), b)])
    with pytest.raises(IncompatiblePieces):
        system(("i",), [(parse_cof("(i=0)"), a), (TOP, b)])


# -- sorts ------------------------------------------------------------------------

def test_sorts():
    assert sort_of(T("comp(g, f)"), NZ) == ("hom", ISO.ob("x"), ISO.ob("x"))
    with pytest.raises(TermError):
        sort_of(Comp(ISO.hom("f"), ISO.hom("f")), NZ)
    with pytest.raises(TermError):
        sort_of(Inv(walking_arrow().hom("f")))
    g = T("glue(x, [(i=0) -> (y, f, g)])", ("i",))
    assert sort_of(g, NZ) == "ob"
    assert iso_laws_hold(IsoTerm(ISO.hom("f"), ISO.hom("g")), NZ)


def test_glue_piece_must_be_iso_between_right_objects():
    with pytest.raises((TermError, TermSyntaxError)):
        sort_of(T("glue(x, [(i=0) -> (y, g, f)])", ("i",)), NZ)


# -- presentations and syntax ---------------------------------------------------

def test_presentation_text_round_trip():
    for p in [ISO, walking_arrow(), walking_idempotent(), set_presentation(["a", "b"])]:
        q = parse_presentation(p.to_text())
        assert (q.theory, q.objects, q.homs, q.rules) == (p.theory, p.objects, p.homs, p.rules)


@pytest.mark.parametrize("text", [
    "theory GRP\n",
    "theory CAT\n[objects]\nx\n[homs]\nf : x -> z\n",
    "theory CAT\n[objects]\nx y\n[homs]\nf : x -> y\n[rules]\nf -> id_x\n",
    "theory CAT\n[objects]\nx x\n",
])
def test_presentation_errors(text):
    with pytest.raises(PresentationError):
        parse_presentation(text)


def test_presentation_error_carries_line():
    with pytest.raises(PresentationError) as info:
        parse_presentation("theory CAT\n[objects]\nx\n[homs]\nf : x -> q\n", source="bad.pres")
    assert info.value.line == 5 and "bad.pres" in str(info.value)


@pytest.mark.parametrize("text, ctx", [
    ("comp(g, f)", ()),
    ("glue(x, [(i=0) -> (y, f, g)])", ("i",)),
    ("inv(gluei(x, [(i=0) -> (y, f, g); (i=1) -> (x, id(x), id(x))]))", ("i",)),
    ("restrict(glue(x, [(i=j) -> (y, f, g)]), {i:=k, j:=k})", ("k",)),
])
def test_syntax_round_trip(text, ctx):
    t = T(text, ctx)
    assert T(show(t), ctx) == t


def test_ext_syntax():
    s = set_presentation(["a", "b"])
    t = parse_term("ext(a, [(i=0) -> b])", s, ("i",))
    assert isinstance(t, ExtSet)
    assert normalize(restrict(t, sub("{i:=0}", (), ("i",))), s) == s.ob("b")


@pytest.mark.parametrize("bad", ["comp(g,", "zz", "glue(x, [(i=0) -> (y, f)])", "id(x) y"])
def test_syntax_errors(bad):
    with pytest.raises((TermSyntaxError, TermError)):
        T(bad, ("i",))


# -- properties -------------------------------------------------------------------

PRESENTATIONS = [ISO, walking_arrow(), set_presentation(["a", "b"])]


@given(st.integers(0, 10_000), st.sampled_from(range(3)))
def test_strategies_agree(seed, k):
    pres = PRESENTATIONS[k]
    rng = random.Random(seed)
    nz = Normalizer(pres)
    t = random_term(rng, pres, ("i", "j")[:rng.randint(0, 2)], 3, nz)
    want = nz.nf(t)
    small = SmallStep(pres)
    for strat in STRATEGIES:
        assert small.normalize(t, strat, seed) == want, strat


@given(st.integers(0, 10_000), st.sampled_from(range(3)))
def test_restriction_functoriality(seed, k):
    pres = PRESENTATIONS[k]
    nz = Normalizer(pres)
    t, f, g = random_triple(random.Random(seed), pres, nz, 3)
    assert nz.nf(restrict(restrict(t, f), g)) == nz.nf(restrict(t, compose(f, g)))
    assert nz.nf(Restrict(Restrict(t, f), g)) == nz.restrict_nf(t, compose(f, g))


@given(st.integers(0, 10_000), st.sampled_from(range(3)))
def test_boundary_law(seed, k):
    pres = PRESENTATIONS[k]
    nz = Normalizer(pres)
    with record_glue_nodes() as nodes:
        t = random_term(random.Random(seed), pres, ("i", "j"), 3, nz)
        nz.nf(t)
    for node in set(nodes):
        assert boundary_violations(node, Normalizer(pres)) == []


@given(st.integers(0, 10_000))
def test_eq_terms_is_a_congruence(seed):
    rng = random.Random(seed)
    nz = Normalizer(ISO)
    ctx = ("i",)
    a = random_term(rng, ISO, ctx, 2, nz, scramble=6)
    b = random_term(rng, ISO, ctx, 2, nz, scramble=0)
    a2 = Restrict(a, Substitution(ctx, ctx, ctx))
    assert eq_terms(a, a2, nz=nz)
    if sort_of(a, nz) == sort_of(b, nz) and isinstance(sort_of(a, nz), tuple):
        s = sort_of(a, nz)
        if s[1] == s[2]:
            # both endomorphisms of one object: compose on either side
            assert eq_terms(Comp(a, b), Comp(a2, nz.nf(b)), nz=nz)


def test_level_zero_cofibrations_are_decided():
    rng = random.Random(0)
    for _ in range(100):
        t = NZ.nf(random_term(rng, ISO, (), 3, NZ))
        for u in subterms(t):
            if isinstance(u, GLUE_TYPES):
                assert u.partial.cof in (BOT,) or u.partial.is_empty
