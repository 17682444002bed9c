from itertools import product
from math import comb

import pytest
from hypothesis import given, strategies as st

from rezk.cube import (CubeError, Substitution, all_substitutions, check_ctx, compose,
                       critical_substitutions, face, factor_through, fresh_name, identity,
                       parse_substitution, projection, weaken)

from strategies import contexts, substitutions


def sub(text, dom=None, cod=None):
    return parse_substitution(text, dom, cod)


def test_context_checks():
    assert check_ctx(()) == ()
    assert check_ctx(["i", "j"]) == ("i", "j")
    with pytest.raises(CubeError):
        check_ctx(("i", "i"))
    with pytest.raises(CubeError):
        check_ctx(("0",))


def test_substitution_rejects_names_outside_domain():
    with pytest.raises(CubeError):
        Substitution(("j",), ("i",), ("k",))
    with pytest.raises(CubeError):
        Substitution((), ("i",), (2,))


def test_parse_and_print():
    f = sub("{i:=0, j:=k}")
    assert f.dom == ("k",) and f.cod == ("i", "j")
    assert f["i"] == 0 and f["j"] == "k"
    assert str(f) == "{i:=0, j:=k}"
    assert sub(str(f), f.dom, f.cod) == f


def test_compose_examples():
    f = sub("{i:=j}", ("j",), ("i",))
    g = sub("{j:=0}", (), ("j",))
    assert compose(f, g) == sub("{i:=0}", (), ("i",))
    g2 = sub("{i:=k}", ("k",), ("i",))
    assert compose(identity(("i",)), g2) == g2
    f3 = Substitution(("j",), ("i", "i'"), ("j", "j"))
    g3 = Substitution((), ("j",), (1,))
    assert compose(f3, g3) == Substitution((), ("i", "i'"), (1, 1))


def test_compose_checks_contexts():
    with pytest.raises(CubeError):
        compose(identity(("i",)), identity(("j",)))


def test_weaken_examples():
    f = Substitution((), ("i",), (0,))
    assert weaken(f, "k") == Substitution(("k",), ("i", "k"), (0, "k"))
    assert weaken(identity(()), "i") == identity(("i",))
    f = Substitution(("j",), ("i",), ("j",))
    g = Substitution((), ("j",), (1,))
    assert weaken(compose(f, g), "k") == compose(weaken(f, "k"), weaken(g, "k"))


def test_projection_and_face():
    p = projection(("i", "j"), ("j",))
    assert p.dom == ("i", "j") and p.cod == ("j",) and p["j"] == "j"
    fc = face(("i", "j"), "i", 1)
    assert fc.dom == ("j",) and fc["i"] == 1 and fc["j"] == "j"


def test_fresh_name():
    assert fresh_name("i", ()) == "i"
    assert fresh_name("i", ("i", "i1")) == "i2"


def _bell(n):
    row = [1]
    for _ in range(n):
        nxt = [row[-1]]
        for x in row:
            nxt.append(nxt[-1] + x)
        row = nxt
    return row[0]


def _critical_count(n):
    # choose which names are sent to endpoints; partition the rest into blocks
    return sum(comb(n, k) * 2 ** k * _bell(n - k) for k in range(n + 1))


@pytest.mark.parametrize("n, expected", [(0, 1), (1, 3), (2, 10), (3, 37)])
def test_critical_substitution_counts(n, expected):
    ctx = ("i", "j", "k")[:n]
    assert _critical_count(n) == expected
    assert len(critical_substitutions(ctx)) == expected


def test_critical_substitutions_of_empty_context():
    assert critical_substitutions(()) == [identity(())]


@pytest.mark.parametrize("ctx", [(), ("i",), ("i", "j")])
def test_every_map_factors_through_exactly_one_critical(ctx):
    crits = critical_substitutions(ctx)
    for dom_size in range(len(ctx) + 1):
        dom = ("a", "b")[:dom_size]
        for f in all_substitutions(dom, ctx):
            hits = [q for q in crits if _factors(q, f)]
            assert len(hits) == 1, (f, hits)
            r = factor_through(hits[0], f)
            assert compose(hits[0], r) == f


def _factors(q, f):
    r = factor_through(q, f)
    if r is None:
        return False
    # the factor must be injective on names of q's domain for uniqueness
    names = [r[v] for v in q.dom]
    return all(isinstance(e, str) for e in names) and len(set(names)) == len(names)


@pytest.mark.parametrize("sizes", list(product(range(3), repeat=3)))
def test_compose_associative_and_unital_exhaustive(sizes):
    K, J, I = (("k1", "k2")[:sizes[0]], ("j1", "j2")[:sizes[1]], ("i1", "i2")[:sizes[2]])
    fs = list(all_substitutions(J, I))
    gs = list(all_substitutions(K, J))
    hs = list(all_substitutions((), K))
    for f in fs:
        assert compose(identity(I), f) == f == compose(f, identity(J))
        for g in gs[:9]:
            for h in hs[:4]:
                assert compose(compose(f, g), h) == compose(f, compose(g, h))


@given(st.data())
def test_compose_associative_random(data):
    I = data.draw(contexts())
    J = data.draw(contexts(("a", "b", "c")))
    K = data.draw(contexts(("u", "v", "w")))
    L = data.draw(contexts(("p", "q")))
    f = data.draw(substitutions(J, I))
    g = data.draw(substitutions(K, J))
    h = data.draw(substitutions(L, K))
    assert compose(compose(f, g), h) == compose(f, compose(g, h))
