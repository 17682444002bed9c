"""Acceptance gate: one test per criterion, each recording a pass/fail line
that the terminal summary prints (see conftest.py)."""

import random
import time
from functools import cache

import pytest

from conftest import ACCEPTANCE
from rezk.cat import derive_wcoe_ob
from rezk.cofib import (BOT, TOP, And, Eq, Forall, Or, decided, entails, forall_elim,
                        oracle_entails, subst_cof)
from rezk.completion import (complete, externalize, fragment_matches_oracle, tower_counts,
                             tower_oracle, truncation_demo, verify_completeness,
                             verify_weq_dim0)
from rezk.cube import critical_substitutions, compose, identity
from rezk.presentation import (discrete, set_presentation, walking_arrow, walking_idempotent,
                               walking_iso)
from rezk.report import PASS
from rezk.rewrite import STRATEGIES, Normalizer, SmallStep, boundary_violations, iso_laws_hold
from rezk.sampling import random_cof, random_glue_line, random_term, random_triple
from rezk.terms import IdHom, record_glue_nodes, restrict

SEED = 20240601
CTX2 = ("i", "j")


def record(key, ok, detail):
    ACCEPTANCE[key] = (bool(ok), detail)
    print(f"{key} {'PASS' if ok else 'FAIL'}  {detail}")


# ---------------------------------------------------------------------------
# the exhaustive small corpus: <= 2 names, at most 5 AST nodes


def _atoms(names):
    order = {e: k for k, e in enumerate(names)}
    return [TOP, BOT] + [Eq(a, b) for a in names for b in names if order[a] <= order[b]]


@cache
def corpus_by_size():
    by = {1: _atoms((0, 1) + CTX2)}
    for n in (3, 5):
        layer = []
        for k in range(1, n - 1, 2):
            for x in by[k]:
                for y in by[n - 1 - k]:
                    layer += [And(x, y), Or(x, y)]
        by[n] = layer
    return by


def corpus():
    return [a for layer in corpus_by_size().values() for a in layer]


# ---------------------------------------------------------------------------
# 1


def test_criterion_1_solver_matches_oracle():
    start = time.perf_counter()
    by = corpus_by_size()
    pairs = bad = 0
    # every pair whose combined size fits in the corpus bound plus one atom
    for s in by:
        for t in by:
            if s + t > 6:
                continue
            for a in by[s]:
                for b in by[t]:
                    pairs += 1
                    if entails(a, b, CTX2) != oracle_entails(a, b, CTX2):
                        bad += 1
    rng = random.Random(SEED)
    randoms = 0
    for _ in range(10_000):
        names = ("i", "j", "k")[:rng.randint(0, 3)]
        a = random_cof(rng, names, rng.randint(3, 11))
        b = random_cof(rng, names, rng.randint(3, 11))
        randoms += 1
        if entails(a, b, names) != oracle_entails(a, b, names):
            bad += 1
    elapsed = time.perf_counter() - start
    ok = bad == 0 and elapsed < 60
    record("C1", ok, f"{pairs} corpus pairs + {randoms} random pairs, {bad} disagreements, "
                     f"{elapsed:.1f}s (limit 60s)")
    assert bad == 0
    assert elapsed < 60


# ---------------------------------------------------------------------------
# 2


def test_criterion_2_forall_elimination():
    checked = bad = 0
    for body in corpus():
        for binder in ("i", "j", "k"):
            ctx = tuple(v for v in CTX2 if v != binder)
            wrapped, elim = Forall(binder, body), forall_elim(binder, body)
            for q in critical_substitutions(ctx):
                checked += 1
                if decided(subst_cof(wrapped, q)) != decided(subst_cof(elim, q)):
                    bad += 1
    record("C2", bad == 0, f"{checked} (formula, binder, critical map) checks, "
                           f"{bad} disagreements")
    assert bad == 0


# ---------------------------------------------------------------------------
# 3


PRESENTATIONS = (walking_iso(), walking_arrow(), set_presentation(["a", "b"]),
                 walking_idempotent())


def test_criterion_3_normalizer_determinism_and_functoriality():
    rng = random.Random(SEED)
    norms = {p.name: Normalizer(p) for p in PRESENTATIONS}
    smalls = {p.name: SmallStep(p) for p in PRESENTATIONS}
    disagreements = 0
    for k in range(1000):
        p = PRESENTATIONS[k % len(PRESENTATIONS)]
        ctx = ("i", "j")[:rng.randint(0, 2)]
        t = random_term(rng, p, ctx, 3, norms[p.name])
        want = norms[p.name].nf(t)
        for strat in STRATEGIES:
            if smalls[p.name].normalize(t, strat, seed=k) != want:
                disagreements += 1
    violations = 0
    for k in range(1000):
        p = PRESENTATIONS[k % len(PRESENTATIONS)]
        nz = norms[p.name]
        t, f, g = random_triple(rng, p, nz, 3)
        if nz.nf(restrict(restrict(t, f), g)) != nz.nf(restrict(t, compose(f, g))):
            violations += 1
    ok = disagreements == 0 and violations == 0
    record("C3", ok, f"1000 terms x {len(STRATEGIES)} strategies: {disagreements} "
                     f"disagreements; 1000 triples: {violations} functoriality violations")
    assert ok


# ---------------------------------------------------------------------------
# glue/ext nodes and certificates produced by criteria 4-7, checked in 8

NODES: dict = {}
CERTS: dict = {}


def _sink(key, pres):
    return NODES.setdefault(key, (pres, []))[1]


@cache
def run_truncation():
    with record_glue_nodes(_sink("C4", set_presentation(["a", "b"]))):
        start = time.perf_counter()
        demo = truncation_demo(("a", "b"), depth=1, problems=200, seed=SEED, max_dims=2)
        elapsed = time.perf_counter() - start
    CERTS["C4"] = (set_presentation(["a", "b"]), demo.certificates)
    return demo, elapsed


def test_criterion_4_truncation():
    demo, elapsed = run_truncation()
    s = set_presentation(["a", "b"])
    ends_ok = demo.endpoints == (s.ob("a"), s.ob("b"))
    wcom = demo.report.of_kind("wcom")
    ok = ends_ok and demo.report.status == PASS and len(wcom) == 200 and elapsed < 30
    record("C4", ok, f"p(0)={demo.endpoints[0]}, p(1)={demo.endpoints[1]}; "
                     f"{demo.report.counts['pass']}/{len(demo.report.obligations)} certificates "
                     f"pass over 200 problems; {elapsed:.1f}s (limit 30s)")
    assert ends_ok
    assert demo.report.status == PASS and len(wcom) == 200
    assert elapsed < 30


# ---------------------------------------------------------------------------
# 5


@cache
def run_walking_iso():
    iso = walking_iso()
    certs: list = []
    with record_glue_nodes(_sink("C5", iso)):
        start = time.perf_counter()
        h = complete(iso)
        frag = externalize(h, 3)
        weq = verify_weq_dim0(h, 3)
        comp = verify_completeness(h, samples=100, seed=SEED, certificates=certs)
        elapsed = time.perf_counter() - start
    CERTS["C5"] = (iso, certs)
    return frag, weq, comp, elapsed


def test_criterion_5_walking_iso_completion():
    frag, weq, comp, elapsed = run_walking_iso()
    kinds = {k: weq.status_of(k) for k in ("ess_surj", "full", "faithful")}
    samples = {o.id.split("/")[0] for o in comp.obligations}
    ok = (set(kinds.values()) == {PASS} and weq.counts["unknown"] == 0
          and comp.status == PASS and len(samples) == 100 and elapsed < 60)
    record("C5", ok, f"{len(frag.objects)} objects / {len(frag.homs)} homs at depth 3; "
                     f"{kinds}, unknown={weq.counts['unknown']}; completeness "
                     f"{comp.counts['pass']}/{len(comp.obligations)} over {len(samples)} "
                     f"samples; {elapsed:.1f}s (limit 60s)")
    assert set(kinds.values()) == {PASS} and weq.counts["unknown"] == 0
    assert comp.status == PASS and len(samples) == 100
    assert elapsed < 60


# ---------------------------------------------------------------------------
# 6


def test_criterion_6_tower_oracle():
    base = discrete()
    frag = externalize(complete(base), 3)
    oracle = tower_oracle(base.objects, [], 3)
    counts, want = frag.counts_by_depth(), tower_counts(oracle, 3)
    iso = fragment_matches_oracle(frag, oracle, base)
    ok = counts == want == [2, 4, 6, 8] and iso
    record("C6", ok, f"counts {counts} vs oracle {want}; graph isomorphic: {iso}")
    assert counts == want == [2, 4, 6, 8]
    assert iso


# ---------------------------------------------------------------------------
# 7


@cache
def run_glue_lines():
    iso = walking_iso()
    nz = Normalizer(iso)
    rng = random.Random(SEED)
    out = []
    with record_glue_nodes(_sink("C7", iso)):
        for _ in range(100):
            ctx = ("j",)[:rng.randint(0, 1)]
            line = random_glue_line(rng, iso, ctx, "i", 2, nz)
            out.append(derive_wcoe_ob(line, "i", nz))
    CERTS["C7"] = (iso, [w.certificate for w in out])
    return out, nz


def test_criterion_7_glue_coercion_coherence():
    structs, nz = run_glue_lines()
    coherence_fail = restriction_fail = restriction_checks = 0
    for w in structs:
        for e in (0, 1, "r"):
            c = w.coe(e, e)
            x = w.at(e, w.level_ctx(e))
            if not (nz.nf(c.fwd) == IdHom(x) and nz.nf(c.inv) == IdHom(x)
                    and iso_laws_hold(c, nz)):
                coherence_fail += 1
        for entry in w.certificate.entries:
            if entry.description.startswith(("restricts to", "on (")):
                restriction_checks += 1
                restriction_fail += not entry.passed
        restriction_fail += bool(w.certificate.failures)
    ok = coherence_fail == 0 and restriction_fail == 0
    record("C7", ok, f"100 glue lines: {coherence_fail} coherence failures at r in "
                     f"{{0, 1, generic}}; {restriction_checks} restriction checks, "
                     f"{restriction_fail} failures")
    assert ok
    assert restriction_checks > 0


# ---------------------------------------------------------------------------
# 8


def test_criterion_8_boundary_law():
    run_truncation()
    run_walking_iso()
    run_glue_lines()
    nodes = violations = 0
    for key, (pres, seen) in sorted(NODES.items()):
        nz = Normalizer(pres)
        for node in set(seen):
            nodes += 1
            violations += len(boundary_violations(node, nz))
    certs = rechecked = 0
    for key, (pres, cs) in sorted(CERTS.items()):
        nz = Normalizer(pres)
        for c in cs:
            certs += 1
            rechecked += not c.recheck(nz)
    ok = violations == 0 and rechecked == 0 and nodes > 0
    record("C8", ok, f"{nodes} distinct glue/ext nodes from criteria 4-7: {violations} "
                     f"boundary violations; {certs} certificates rechecked, "
                     f"{rechecked} disagreements")
    assert nodes > 0
    assert violations == 0 and rechecked == 0
