from itertools import product

import pytest
from hypothesis import given, strategies as st

from rezk.cofib import (BOT, TOP, And, CofError, Eq, Forall, Or, decided, dnf,
                        entailment_witness, entails, equivalent, forall_elim, make_conjunct,
                        oracle_entails, oracle_sieve, parse_cof, quotient, show_cof, subst_cof)
from rezk.cube import (Substitution, all_substitutions, compose, critical_substitutions,
                       identity, parse_substitution, projection)

from strategies import cofs, substitutions

P = parse_cof


def eqs(conjuncts):
    return [dict(c.equations) for c in conjuncts]


# -- syntax ------------------------------------------------------------------

def test_parse_and_show_round_trip():
    for text in ["(i=0)", "(i=j) /\\ (j=1)", "T", "F", "forall k. (k=i) \\/ (i=0)",
                 "((i=0) \\/ (i=1)) /\\ (j=k)"]:
        a = P(text)
        assert P(show_cof(a)) == a


def test_parse_errors():
    for bad in ["(i=", "i=0", "(i=0) /\\", "(i=2)"]:
        with pytest.raises(CofError):
            P(bad)


def test_top_bot_are_sugar():
    for ctx in [("i",), ("i", "j")]:
        assert oracle_sieve(TOP, ctx) == oracle_sieve(Eq(0, 0), ctx)
        assert oracle_sieve(BOT, ctx) == oracle_sieve(Eq(0, 1), ctx)
    assert dnf(TOP, ()) == dnf(Eq(0, 0), ())
    assert dnf(BOT, ()) == dnf(Eq(1, 0), ()) == ()


# -- substitution --------------------------------------------------------------

def test_subst_cof_examples():
    f = parse_substitution("{i:=0, j:=0}", (), ("i", "j"))
    assert subst_cof(P("(i=j)"), f) == Eq(0, 0)
    g = parse_substitution("{i:=0}", (), ("i",))
    assert subst_cof(P("forall k. (k=i)"), g) == Forall("k", Eq("k", 0))
    h = parse_substitution("{i:=j}", ("j",), ("i",))
    assert subst_cof(P("(i=0) \\/ (i=1)"), h) == P("(j=0) \\/ (j=1)")


def test_subst_cof_avoids_capture():
    f = Substitution(("k",), ("i",), ("k",))
    out = subst_cof(Forall("k", Eq("k", "i")), f)
    assert isinstance(out, Forall) and out.binder != "k"
    assert not decided(out)
    assert decided(subst_cof(out, Substitution((), ("k",), (0,)))) is False


# -- decided -------------------------------------------------------------------

def test_decided_examples():
    assert decided(P("(i=i)"))
    assert not decided(P("(0=1)"))
    assert not decided(P("forall i. (i=j)"))
    assert not decided(P("forall i. (j=1) \\/ (j=0)"))
    assert decided(P("forall i. (i=i)"))


@pytest.mark.parametrize("ctx", [(), ("i",), ("i", "j")])
def test_decided_is_substitution_stable(ctx):
    corpus = _small_corpus(ctx + (0, 1), 3)
    for a in corpus:
        if not decided(a):
            continue
        for dom in [(), ("a",)]:
            for f in all_substitutions(dom, ctx):
                assert decided(subst_cof(a, f))


# -- dnf / forall ----------------------------------------------------------------

def test_dnf_examples():
    assert eqs(dnf(P("(i=0) \\/ ((i=1) /\\ (j=0))"), ("i", "j"))) == [
        {"i": 0}, {"i": 1, "j": 0}]
    assert eqs(dnf(P("((i=0) \\/ (i=1)) /\\ (j=k)"), ("i", "j", "k"))) == [
        {"i": 0, "k": "j"}, {"i": 1, "k": "j"}]
    assert eqs(dnf(P("forall k. (k=0) \\/ (i=1)"), ("i",))) == [{"i": 1}]


def test_dnf_drops_unsatisfiable_and_subsumed():
    assert dnf(P("(i=0) /\\ (i=1)"), ("i",)) == ()
    assert eqs(dnf(P("(i=0) \\/ ((i=0) /\\ (j=1))"), ("i", "j"))) == [{"i": 0}]
    assert eqs(dnf(P("(i=0) \\/ T"), ("i",))) == [{}]


def test_dnf_rejects_free_names_outside_context():
    with pytest.raises(CofError):
        dnf(P("(i=k)"), ("i",))


def test_forall_elim_examples():
    assert forall_elim("i", P("(j=1)")) == P("(j=1)")
    assert forall_elim("i", P("(i=i)")) == TOP
    assert forall_elim("i", P("(i=0)")) == BOT
    assert forall_elim("i", P("(i=j) \\/ (j=0)")) == P("(j=0)")


def _sieve_of_forall(binder, body, ctx):
    """Membership of Forall at each critical q, through the generic extension."""
    out = set()
    for k, q in enumerate(critical_substitutions(ctx)):
        fresh = binder + "'"
        ext = Substitution(q.dom + (fresh,), ctx + (binder,), q.images + (fresh,))
        if decided(subst_cof(body, ext)):
            out.add(k)
    return frozenset(out)


@given(cofs(("i", "j", "k"), max_leaves=6))
def test_forall_elim_preserves_sieves(body):
    ctx = ("i", "j")
    elim = forall_elim("k", body)
    assert "k" not in _free(elim)
    assert oracle_sieve(elim, ctx) == _sieve_of_forall("k", body, ctx)
    assert oracle_sieve(Forall("k", body), ctx) == oracle_sieve(elim, ctx)


def _free(a):
    from rezk.cofib import free_vars
    return free_vars(a)


# -- quotient --------------------------------------------------------------------

def test_quotient_examples():
    q = quotient(make_conjunct(("i", "j"), [("i", 0), ("j", 0)]))
    assert q.images == (0, 0) and q.dom == ()
    assert make_conjunct(("i",), [("i", 0), ("i", 1)]) is None
    q = quotient(make_conjunct(("i", "j", "k"), [("i", "j")]))
    assert q.images[0] == q.images[1] and q.images[2] == "k"
    assert len(q.dom) == 2


@pytest.mark.parametrize("ctx", [("i",), ("i", "j"), ("i", "j", "k")])
def test_quotient_is_most_general(ctx):
    names = ctx + (0, 1)
    for pairs in product(product(names, repeat=2), repeat=2):
        c = make_conjunct(ctx, pairs)
        sols = [f for f in all_substitutions(("a", "b"), ctx)
                if all(_val(f, l) == _val(f, r) for l, r in pairs)]
        if c is None:
            assert not sols
            continue
        q = quotient(c)
        assert c.holds_under(q)
        for f in sols:
            # f factors through q: restrict f to q's domain
            r = Substitution(f.dom, q.dom, tuple(f[v] for v in q.dom))
            assert compose(q, r) == f


def _val(f, e):
    return f[e] if isinstance(e, str) else e


# -- entailment --------------------------------------------------------------------

def test_entails_examples():
    assert entails(P("(i=0) /\\ (j=0)"), P("(i=j)"))
    assert oracle_entails(P("(i=0) /\\ (j=0)"), P("(i=j)"))
    assert not entails(TOP, P("(i=0)"), ("i",))
    assert not oracle_entails(TOP, P("(i=0)"), ("i",))
    a, b = P("(i=j)"), P("(i=0) \\/ (i=1)")
    assert not entails(a, b)
    w = entailment_witness(a, b)
    assert w["i"] == w["j"] and isinstance(w["i"], str)


def _small_corpus(names, max_size):
    atoms = [TOP, BOT] + [Eq(a, b) for a, b in product(names, repeat=2)
                          if str(a) <= str(b)]
    by_size = {1: atoms}
    for n in range(3, max_size + 1, 2):
        layer = []
        for k in range(1, n - 1, 2):
            for x in by_size[k]:
                for y in by_size[n - 1 - k]:
                    layer.append(And(x, y))
                    layer.append(Or(x, y))
        by_size[n] = layer
    return [a for layer in by_size.values() for a in layer]


def test_entails_top_and_bot_on_corpus():
    ctx = ("i", "j")
    for a in _small_corpus(ctx + (0, 1), 3):
        assert entails(a, TOP, ctx) and entails(BOT, a, ctx)


def test_solver_agrees_with_oracle_on_small_corpus():
    ctx = ("i", "j")
    corpus = _small_corpus(ctx + (0, 1), 3)
    atoms = _small_corpus(ctx + (0, 1), 1)
    for a in corpus:
        for b in atoms:
            assert entails(a, b, ctx) == oracle_entails(a, b, ctx), (a, b)
            assert entails(b, a, ctx) == oracle_entails(b, a, ctx), (b, a)


@given(cofs(), cofs())
def test_solver_agrees_with_oracle_random(a, b):
    assert entails(a, b, ("i", "j")) == oracle_entails(a, b, ("i", "j"))


@given(cofs(("i", "j", "k")), cofs(("i", "j", "k")))
def test_solver_agrees_with_oracle_three_names(a, b):
    ctx = ("i", "j", "k")
    assert entails(a, b, ctx) == oracle_entails(a, b, ctx)


@given(cofs(), cofs(), cofs())
def test_entails_is_a_preorder(a, b, c):
    ctx = ("i", "j")
    assert entails(a, a, ctx)
    if entails(a, b, ctx) and entails(b, c, ctx):
        assert entails(a, c, ctx)


@given(cofs(), cofs())
def test_dnf_canonical_iff_equivalent(a, b):
    ctx = ("i", "j")
    assert (dnf(a, ctx) == dnf(b, ctx)) == equivalent(a, b, ctx)
    assert (dnf(a, ctx) == dnf(b, ctx)) == (oracle_sieve(a, ctx) == oracle_sieve(b, ctx))


@given(cofs(("i", "j")), cofs(("i", "j", "k")))
def test_forall_adjunction(beta, alpha):
    ctx = ("i", "j")
    p = projection(ctx + ("k",), ctx)
    assert entails(beta, Forall("k", alpha), ctx) == entails(subst_cof(beta, p), alpha,
                                                              ctx + ("k",))


@given(cofs(), st.data())
def test_dnf_commutes_with_substitution(a, data):
    ctx = ("i", "j")
    f = data.draw(substitutions(("a",), ctx))
    lhs = oracle_sieve(subst_cof(a, f), ("a",))
    from rezk.cofib import from_conjuncts
    rhs = oracle_sieve(subst_cof(from_conjuncts(dnf(a, ctx)), f), ("a",))
    assert lhs == rhs
