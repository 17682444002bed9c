import json

import pytest

from rezk.cli import main, run


def call(*argv):
    code, out, _ = run(list(argv))
    return code, out


def test_cof_entails_true():
    code, out = call("cof", "entails", "(i=0)/\\(j=0)", "(i=j)")
    assert code == 0 and out["result"] is True


def test_cof_entails_false_has_witness():
    code, out = call("cof", "entails", "(i=j)", "(i=0) \\/ (i=1)")
    assert code == 1 and out["result"] is False and out["witnesses"]


def test_cof_dnf_and_decide():
    code, out = call("cof", "dnf", "forall k. (k=0) \\/ (i=1)")
    assert code == 0 and "(i=1)" in json.dumps(out)
    assert call("cof", "decide", "(i=i)")[0] == 0
    assert call("cof", "decide", "(0=1)")[0] == 1


def test_cof_parse_error():
    code, out = call("cof", "decide", "(i=")
    assert code == 2 and "error" in out


def test_normalize():
    code, out = call("normalize", "comp(g, f)")
    assert code == 0 and out["normal_form"] == "id(x)"
    code, out = call("normalize", "comp(g, f)", "--strategy", "random", "--seed", "4")
    assert out["normal_form"] == "id(x)"


def test_enumerate():
    code, out = call("enumerate", "--pres", "set:a,b", "--sort", "elt", "--depth", "1")
    assert code == 0 and out["count"] == 4


def test_malformed_presentation(tmp_path):
    bad = tmp_path / "bad.pres"
    bad.write_text("theory CAT\n[objects]\nx\n[homs]\nf : x -> nowhere\n")
    code, out = call("complete", str(bad))
    assert code == 2 and out["line"] == 5 and "bad.pres" in out["source"]


def test_presentation_file(tmp_path):
    p = tmp_path / "walking_iso.pres"
    p.write_text("theory CAT\n[objects]\nx y\n[homs]\nf : x -> y\ng : y -> x\n"
                 "[rules]\ng.f -> id_x\nf.g -> id_y\n")
    code, out = call("complete", str(p), "--verify-weq", "--depth", "3")
    assert code == 0 and out["status"] == "pass" and out["counts"]["unknown"] == 0


def test_complete_externalize_oracle():
    code, out = call("complete", "discrete", "--externalize", "--depth", "3")
    assert code == 0
    assert any(o["id"] == "externalize/tower_oracle" for o in out["obligations"])


def test_budget_gives_unknown():
    code, out = call("complete", "walking_iso", "--verify-weq", "--depth", "2",
                     "--step-budget", "1")
    assert code == 3


def test_budget_does_not_leak():
    call("normalize", "comp(g, f)", "--step-budget", "1")
    code, out = call("normalize", "comp(g, f)")
    assert code == 0


def test_kan_problem(tmp_path):
    prob = tmp_path / "p.json"
    prob.write_text(json.dumps({"presentation": "set:a,b", "ctx": ["i"], "r": "0",
                                "s": "s", "alpha": "(i=0)", "line": "ext(a, [(z=1) -> b])"}))
    code, out = call("kan", "wcom", "--problem", str(prob))
    assert code == 0 and out["certificate"]["pass"]
    prob.write_text(json.dumps({"presentation": "set:a,b", "ctx": [], "r": "0", "s": "1",
                                "alpha": "T", "line": "a", "method": "prg"}))
    assert call("kan", "wcom", "--problem", str(prob))[0] == 0
    prob.write_text("{not json")
    assert call("kan", "wcom", "--problem", str(prob))[0] == 2


def test_cat_check(tmp_path):
    f = tmp_path / "incl.fun"
    f.write_text("source walking_arrow\ntarget walking_iso\nx -> x\ny -> y\nf -> f\n")
    code, out = call("cat", "check", "--functor", str(f), "--depth", "3")
    assert code == 1 and out["classes"]["weak_equivalence"] == "fail"
    f.write_text("source walking_iso\ntarget walking_iso\nx -> x\ny -> y\nf -> f\ng -> g\n")
    assert call("cat", "check", "--functor", str(f))[0] == 0


def test_truncate_demo():
    code, out = call("truncate-demo", "--problems", "5")
    assert code == 0 and out["path"]["endpoints"] == ["a", "b"]


def _strip(out):
    out = dict(out)
    out.pop("timings", None)
    return out


def test_determinism_modulo_timings():
    argv = ["complete", "walking_iso", "--verify-completeness", "--samples", "5",
            "--seed", "11"]
    a, b = call(*argv)[1], call(*argv)[1]
    assert json.dumps(_strip(a), sort_keys=True) == json.dumps(_strip(b), sort_keys=True)


def test_main_writes_out_and_text(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert main(["truncate-demo", "--problems", "2", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["status"] == "pass"
    capsys.readouterr()
    main(["truncate-demo", "--problems", "2", "--format", "text"])
    assert "status: pass" in capsys.readouterr().out
