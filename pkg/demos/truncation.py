"""The free set on {a, b} with an extension operation is a propositional
truncation: any two elements are joined by a path, and weak composition is
derived from ext alone."""

import random

from rezk.cofib import BOT
from rezk.completion import truncation_demo
from rezk.kan import problem_from_total, wcom_from_ext
from rezk.presentation import set_presentation
from rezk.rewrite import Normalizer
from rezk.sampling import random_set_problem
from rezk.terms import show


def main():
    demo = truncation_demo(("a", "b"), depth=1, problems=50, seed=1)
    print(f"path  p({demo.dim}) = {show(demo.path)}")
    print(f"ends  p(0) = {show(demo.endpoints[0])},  p(1) = {show(demo.endpoints[1])}")
    c = demo.report.counts
    print(f"paths between depth-1 elements and 50 random fillings: "
          f"{c['pass']} pass, {c['fail']} fail")

    s = set_presentation(["a", "b"])
    nz = Normalizer(s)
    prob = random_set_problem(random.Random(7), s, 2, nz)
    res = wcom_from_ext(prob, nz)
    print(f"\none filling problem over {prob.ctx}: r={prob.r}, s={prob.s}")
    print(f"  tube   {[(str(c), show(t)) for c, t in prob.tube.pieces]}")
    print(f"  base   {show(prob.base)}")
    print(f"  filler {show(res.filler)}")
    for e in res.certificate.entries:
        print(f"  [{'ok' if e.passed else 'FAIL'}] {e.description} @ {e.where}")

    empty = problem_from_total((), 0, 1, BOT, s.ob("a", ("z",)), nz=nz)
    print(f"\nwith nothing to extend the filler is a fresh element: "
          f"{show(wcom_from_ext(empty, nz).filler)}")


if __name__ == "__main__":
    main()
