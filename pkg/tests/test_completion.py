import pytest

from rezk.cofib import BOT, TOP, parse_cof
from rezk.completion import (NonPropositionalPiece, complete, ess_surj_witness, ext_hom,
                             ext_ob, externalize, fragment_matches_oracle, tower_counts,
                             tower_oracle, truncation_demo, verify_completeness,
                             verify_weq_dim0)
from rezk.cube import Substitution
from rezk.presentation import (discrete, empty_category, set_presentation, walking_arrow,
                               walking_iso, walking_loop)
from rezk.report import PASS
from rezk.rewrite import compose_iso, empty_partial, inverse_iso, iso_laws_hold, system
from rezk.terms import Comp, GlueIsoFwd, GlueOb, IdHom, IsoTerm, PartialElement

ISO = walking_iso()


def iso_piece(ctx, alpha):
    return system(ctx, [(alpha, (ISO.ob("y", ctx), IsoTerm(ISO.hom("f", ctx),
                                                             ISO.hom("g", ctx))))])


def test_complete_is_idempotent():
    assert complete(ISO) is complete(ISO)
    assert complete(ISO).include("f") == ISO.hom("f")


def test_ext_ob_top_collapses():
    h = complete(ISO)
    ob, e = ext_ob(h, ISO.ob("x"), TOP, iso_piece((), TOP))
    assert ob == ISO.ob("y") and e == IsoTerm(ISO.hom("f"), ISO.hom("g"))


def test_ext_ob_bot_is_free_glue():
    h = complete(ISO)
    ob, e = ext_ob(h, ISO.ob("x"), BOT, empty_partial(()))
    assert isinstance(ob, GlueOb) and ob.partial.is_empty
    assert isinstance(e.fwd, GlueIsoFwd)
    assert iso_laws_hold(e, h.nz)


def test_ext_ob_extends_pieces():
    h = complete(ISO)
    ctx = ("i",)
    alpha = parse_cof("(i=0)")
    ob, e = ext_ob(h, ISO.ob("x", ctx), alpha, iso_piece(ctx, alpha))
    at0 = Substitution((), ctx, (0,))
    assert h.nz.restrict_nf(ob, at0) == ISO.ob("y")
    assert h.nz.restrict_nf(e.fwd, at0) == ISO.hom("f")
    assert h.nz.restrict_nf(e.inv, at0) == ISO.hom("g")


def test_ext_hom():
    h = complete(ISO)
    f = ISO.hom("f")
    assert ext_hom(h, f, BOT, empty_partial(())) == f
    p = system((), [(TOP, Comp(IdHom(ISO.ob("y")), f))])
    assert ext_hom(h, f, TOP, p) == f
    loop = walking_loop()
    l = loop.hom("l")
    other = system((), [(TOP, Comp(l, l))])
    with pytest.raises(NonPropositionalPiece):
        ext_hom(complete(loop), l, TOP, other)


def test_ess_surj_witness():
    h = complete(ISO)
    x = ISO.ob("x")
    assert ess_surj_witness(h, x) == (x, IsoTerm(IdHom(x), IdHom(x)))
    g1 = GlueOb(x, PartialElement((), ()))
    b, e = ess_surj_witness(h, g1)
    assert b == x and e.fwd == GlueIsoFwd(x, PartialElement((), ()))
    g2 = GlueOb(g1, PartialElement((), ()))
    b, e = ess_surj_witness(h, g2)
    assert b == x and iso_laws_hold(e, h.nz)


def test_every_enumerated_object_has_a_witness():
    h = complete(ISO)
    for o in h.enumerate("ob", (), 3):
        b, e = ess_surj_witness(h, o)
        assert b.name in ISO.objects and iso_laws_hold(e, h.nz)


def test_empty_presentation():
    h = complete(empty_category())
    frag = externalize(h, 3)
    assert frag.objects == [] and frag.homs == []


def test_walking_iso_depth_one():
    h = complete(ISO)
    frag = externalize(h, 1)
    assert len(frag.objects) == 4
    base_iso = {("x", "x"): None, ("y", "y"): None,
                ("x", "y"): IsoTerm(ISO.hom("f"), ISO.hom("g")),
                ("y", "x"): IsoTerm(ISO.hom("g"), ISO.hom("f"))}
    for a in frag.objects:
        for b in frag.objects:
            xa, ea = ess_surj_witness(h, a)
            xb, eb = ess_surj_witness(h, b)
            k = base_iso[(xa.name, xb.name)] or IsoTerm(IdHom(xa), IdHom(xa))
            e = compose_iso(eb, compose_iso(k, inverse_iso(ea)))
            assert iso_laws_hold(e, h.nz)


@pytest.mark.parametrize("depth", range(4))
def test_discrete_tower_oracle(depth):
    base = discrete()
    frag = externalize(complete(base), depth)
    oracle = tower_oracle(base.objects, [], depth)
    assert frag.counts_by_depth() == tower_counts(oracle, depth) == [2 * (d + 1) for d in
                                                                     range(depth + 1)]
    assert fragment_matches_oracle(frag, oracle, base)


def test_tower_closed_form():
    g = tower_oracle(["x", "y", "z"], [], 4)
    counts = tower_counts(g, 4)
    for d in range(1, 5):
        assert counts[d] == counts[d - 1] + 3


def test_arrow_tower_isomorphism():
    base = walking_arrow()
    frag = externalize(complete(base), 2)
    oracle = tower_oracle(base.objects, [("x", "y", False)], 2)
    assert fragment_matches_oracle(frag, oracle, base)


@pytest.mark.parametrize("make", [walking_iso, walking_arrow, discrete])
def test_weq_dim0(make):
    rep = verify_weq_dim0(complete(make()), 3)
    assert rep.status == PASS and rep.counts["unknown"] == 0
    assert {o.kind for o in rep.obligations} >= {"ess_surj", "full"}


def test_completeness_small():
    rep = verify_completeness(complete(ISO), samples=10, seed=1)
    assert rep.status == PASS, [o.to_json() for o in rep.obligations if o.status != PASS]
    assert {"ext_ob", "path", "wcom_ob", "wcom_hom"} <= {o.kind for o in rep.obligations}


def test_completeness_set():
    rep = verify_completeness(complete(set_presentation(["a", "b"])), samples=10, seed=2)
    assert rep.status == PASS


def test_completeness_is_deterministic():
    a = verify_completeness(complete(ISO), samples=5, seed=7).to_json()
    b = verify_completeness(complete(ISO), samples=5, seed=7).to_json()
    a.pop("timings"), b.pop("timings")
    assert a == b


def test_truncation_demo_small():
    demo = truncation_demo(("a", "b"), 1, problems=10, seed=3)
    s = set_presentation(["a", "b"])
    assert demo.endpoints == (s.ob("a"), s.ob("b"))
    assert demo.report.status == PASS
