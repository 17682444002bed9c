"""Command-line front end.

Exit status: 0 when every obligation passes, 1 on any failure, 2 on parse or
validation errors, 3 when the only problems are exhausted budgets.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import cofib
from .cat import check_split_classes, load_functor
from .completion import (complete, externalize, fragment_matches_oracle, tower_counts,
                         tower_oracle, truncation_demo, verify_completeness, verify_weq_dim0)
from .cube import CubeError, check_ctx
from .enumeration import Enumerator
from .kan import fibrancy_from_prg, problem_from_total, set_instance, wcom_from_ext
from .presentation import (BUILTIN, Presentation, PresentationError, load_presentation,
                           set_presentation)
from .report import FAIL, PASS, Report
from .rewrite import (STRATEGIES, BudgetExceeded, IncompatiblePieces, Normalizer, SmallStep,
                      sort_of)
from .syntax import TermSyntaxError, parse_term
from .terms import TermError, show

EXIT_PASS, EXIT_FAIL, EXIT_PARSE, EXIT_UNKNOWN = 0, 1, 2, 3


class UsageError(Exception):
    def __init__(self, message: str, **info):
        self.info = info
        super().__init__(message)


def resolve_presentation(ref: str) -> Presentation:
    """A built-in name, ``set:a,b,...`` or a path to a presentation file."""
    if ref in BUILTIN:
        return BUILTIN[ref]()
    if ref.startswith("set:"):
        return set_presentation([e for e in ref[4:].split(",") if e])
    path = Path(ref)
    if not path.exists():
        raise UsageError(f"no such presentation: {ref}")
    return load_presentation(path)


def _ctx(text: Optional[str]) -> tuple:
    if not text:
        return ()
    return check_ctx(tuple(v.strip() for v in text.split(",") if v.strip()))


def _expr(text):
    if isinstance(text, int):
        return text
    return int(text) if text in ("0", "1") else text


# ---------------------------------------------------------------------------
# commands


def cmd_cof(args) -> tuple:
    a = cofib.parse_cof(args.formula)
    ctx = _ctx(args.ctx) if args.ctx else None
    if args.action == "entails":
        if args.other is None:
            raise UsageError("cof entails needs two formulas")
        b = cofib.parse_cof(args.other)
        ok = cofib.entails(a, b, ctx)
        w = None if ok else cofib.entailment_witness(a, b, ctx)
        return {"result": ok, "witnesses": [] if w is None else [str(w)]}, (
            EXIT_PASS if ok else EXIT_FAIL)
    if args.action == "dnf":
        conjs = cofib.dnf(a, ctx)
        return {"result": cofib.show_dnf(conjs), "conjuncts": [str(c) for c in conjs],
                "witnesses": []}, EXIT_PASS
    ok = cofib.decided(a)
    return {"result": ok, "witnesses": []}, EXIT_PASS if ok else EXIT_FAIL


def cmd_normalize(args) -> tuple:
    pres = resolve_presentation(args.pres)
    nz = Normalizer(pres)
    t = parse_term(args.term, pres, _ctx(args.ctx), nz)
    sort = sort_of(t, nz)
    if args.strategy == "big-step":
        n = nz.nf(t)
        steps = nz.last_steps
    else:
        n = SmallStep(pres).normalize(t, args.strategy, seed=args.seed)
        steps = None
    out = {"input": show(t), "normal_form": show(n),
           "sort": sort if isinstance(sort, str) else ["hom", show(sort[1]), show(sort[2])]}
    if steps is not None:
        out["steps"] = steps
    return out, EXIT_PASS


def cmd_enumerate(args) -> tuple:
    pres = resolve_presentation(args.pres)
    terms = Enumerator(pres, glue=not args.no_glue).enumerate(args.sort, _ctx(args.ctx),
                                                              args.depth)
    return {"count": len(terms), "terms": [show(t) for t in terms]}, EXIT_PASS


def load_problem(path: str) -> tuple:
    """Read a filling problem file (JSON): ``presentation`` (SET), ``ctx``,
    ``r``, ``s``, ``alpha``, ``line`` (a term over ``ctx + z``) and optional
    ``z``, ``base`` and ``method`` (``ext`` or ``prg``)."""
    try:
        data = json.loads(Path(path).read_text())
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e}") from None
    except json.JSONDecodeError as e:
        raise UsageError(f"{path}: invalid JSON: {e.msg}", line=e.lineno) from None
    missing = [k for k in ("presentation", "r", "s", "alpha", "line") if k not in data]
    if missing:
        raise UsageError(f"{path}: missing fields {missing}")
    pres = resolve_presentation(data["presentation"])
    if pres.theory != "SET":
        raise UsageError("kan wcom problems live in a SET presentation")
    nz = Normalizer(pres)
    ctx = check_ctx(data.get("ctx", []))
    z = data.get("z", "z")
    line = parse_term(data["line"], pres, ctx + (z,), nz)
    base = parse_term(data["base"], pres, ctx, nz) if data.get("base") else None
    prob = problem_from_total(ctx, _expr(data["r"]), _expr(data["s"]),
                              cofib.parse_cof(data["alpha"]), line, z, base, nz)
    return prob, nz, data.get("method", "ext")


def cmd_kan(args) -> tuple:
    prob, nz, method = load_problem(args.problem)
    res = (wcom_from_ext(prob, nz) if method == "ext"
           else fibrancy_from_prg(set_instance(), prob, nz))
    rep = Report()
    cert = res.certificate
    rep.add("wcom/certificate", "wcom", PASS if cert.passed else FAIL, cert.first_failure())
    rep.extra.update({"filler": show(res.filler) if res.filler is not None else None,
                      "path": show(res.path) if res.path is not None else None,
                      "path_dim": res.path_dim, "certificate": cert.to_json()})
    return rep.to_json(), rep.exit_code


def cmd_cat(args) -> tuple:
    rep = check_split_classes(load_functor(args.functor), args.depth)
    return rep.to_json(), rep.exit_code


def cmd_complete(args) -> tuple:
    pres = resolve_presentation(args.presentation)
    h = complete(pres)
    rep = Report()
    rep.extra["presentation"] = pres.name or args.presentation
    if args.externalize or not (args.verify_weq or args.verify_completeness):
        with rep.timed("externalize"):
            frag = externalize(h, args.depth)
        rep.extra["fragment"] = frag.to_json()
        if pres.theory == "CAT" and not pres.homs:
            oracle = tower_oracle(pres.objects, [], args.depth)
            same = (frag.counts_by_depth() == tower_counts(oracle, args.depth)
                    and fragment_matches_oracle(frag, oracle, pres))
            rep.add("externalize/tower_oracle", "oracle", PASS if same else FAIL,
                    {"counts": frag.counts_by_depth()})
    if args.verify_weq:
        rep.extend(verify_weq_dim0(h, args.depth))
    if args.verify_completeness:
        rep.extend(verify_completeness(h, args.samples, args.seed))
    return rep.to_json(), rep.exit_code


def cmd_truncate(args) -> tuple:
    elements = [e for e in args.elements.split(",") if e]
    if not elements:
        raise UsageError("--elements needs at least one name")
    demo = truncation_demo(elements, args.depth, args.problems, args.seed)
    rep = demo.report
    rep.extra["path"] = {"term": show(demo.path), "dim": demo.dim,
                         "endpoints": [show(e) for e in demo.endpoints]}
    return rep.to_json(), rep.exit_code


# ---------------------------------------------------------------------------
# plumbing


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--step-budget", type=int, default=None,
                        help="rewrite steps per normalization (overrides RF_STEP_BUDGET)")
    common.add_argument("--out", default=None, help="also write the JSON report here")

    p = argparse.ArgumentParser(prog="rezk", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("cof", parents=[common], help="cofibration solver")
    c.add_argument("action", choices=("entails", "dnf", "decide"))
    c.add_argument("formula")
    c.add_argument("other", nargs="?")
    c.add_argument("--ctx", default=None, help="comma-separated dimension names")
    c.set_defaults(run=cmd_cof)

    n = sub.add_parser("normalize", parents=[common], help="normal form of a term")
    n.add_argument("term")
    n.add_argument("--pres", default="walking_iso")
    n.add_argument("--ctx", default="")
    n.add_argument("--strategy", choices=("big-step",) + STRATEGIES, default="big-step")
    n.set_defaults(run=cmd_normalize)

    e = sub.add_parser("enumerate", parents=[common], help="normal forms up to a depth")
    e.add_argument("--pres", default="walking_iso")
    e.add_argument("--sort", choices=("ob", "hom", "elt"), default="ob")
    e.add_argument("--ctx", default="")
    e.add_argument("--depth", type=int, default=1)
    e.add_argument("--no-glue", action="store_true")
    e.set_defaults(run=cmd_enumerate)

    k = sub.add_parser("kan", parents=[common], help="weak composition")
    k.add_argument("action", choices=("wcom",))
    k.add_argument("--problem", required=True)
    k.set_defaults(run=cmd_kan)

    ct = sub.add_parser("cat", parents=[common], help="split classes of a functor")
    ct.add_argument("action", choices=("check",))
    ct.add_argument("--functor", required=True)
    ct.add_argument("--depth", type=int, default=3)
    ct.set_defaults(run=cmd_cat)

    cp = sub.add_parser("complete", parents=[common], help="completion of a presentation")
    cp.add_argument("presentation")
    cp.add_argument("--depth", type=int, default=2)
    cp.add_argument("--externalize", action="store_true")
    cp.add_argument("--verify-weq", action="store_true")
    cp.add_argument("--verify-completeness", action="store_true")
    cp.add_argument("--samples", type=int, default=20)
    cp.set_defaults(run=cmd_complete)

    t = sub.add_parser("truncate-demo", parents=[common], help="propositional truncation demo")
    t.add_argument("--elements", default="a,b")
    t.add_argument("--depth", type=int, default=1)
    t.add_argument("--problems", type=int, default=50)
    t.set_defaults(run=cmd_truncate)
    return p


def _text(out: dict) -> str:
    lines = []
    if "obligations" in out:
        for o in out["obligations"]:
            lines.append(f"{o['status'].upper():8} {o['id']}")
        c = out["counts"]
        lines.append(f"status: {out['status']}  pass={c['pass']} fail={c['fail']} "
                     f"unknown={c['unknown']}")
        for key in sorted(set(out) - {"obligations", "counts", "status", "timings"}):
            lines.append(f"{key}: {json.dumps(out[key], sort_keys=True)}")
        return "\n".join(lines)
    for key in sorted(out):
        v = out[key]
        if isinstance(v, list):
            lines.append(f"{key}:")
            lines += [f"  {x}" for x in v]
        else:
            lines.append(f"{key}: {v}")
    return "\n".join(lines)


def run(argv: Optional[Sequence[str]] = None) -> tuple:
    """Parse ``argv`` and execute; returns ``(exit status, report dict, format)``."""
    parser = build_parser()
    args = parser.parse_args(argv)
    saved = os.environ.get("RF_STEP_BUDGET")
    if args.step_budget is not None:
        os.environ["RF_STEP_BUDGET"] = str(args.step_budget)
    try:
        out, code = args.run(args)
    except (PresentationError, TermSyntaxError, cofib.CofError, CubeError,
            IncompatiblePieces, TermError, UsageError) as e:
        err = {"error": str(e), "kind": type(e).__name__}
        line = getattr(e, "line", None) or getattr(e, "info", {}).get("line")
        if line is not None:
            err["line"] = line
        if getattr(e, "source", None):
            err["source"] = e.source
        return EXIT_PARSE, err, args
    except BudgetExceeded as e:
        return EXIT_UNKNOWN, {"error": str(e), "kind": "BudgetExceeded", "status": "unknown"}, args
    finally:
        if saved is None:
            os.environ.pop("RF_STEP_BUDGET", None)
        else:
            os.environ["RF_STEP_BUDGET"] = saved
    return code, out, args


def main(argv: Optional[Sequence[str]] = None) -> int:
    code, out, args = run(argv)
    text = json.dumps(out, sort_keys=True, indent=2)
    if getattr(args, "out", None):
        Path(args.out).write_text(text + "\n")
    if args.format == "text":
        print(_text(out))
    else:
        print(text)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
