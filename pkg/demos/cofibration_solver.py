"""Deciding entailment between interval formulas, and checking the answer
against brute force over the finitely many critical substitutions."""

from rezk.cofib import (dnf, entailment_witness, entails, forall_elim, oracle_entails,
                        parse_cof, show_cof, show_dnf)
from rezk.cube import critical_substitutions

CASES = [
    ("(i=0) /\\ (j=0)", "(i=j)"),
    ("(i=j)", "(i=0) \\/ (i=1)"),
    ("(i=0) \\/ ((i=1) /\\ (j=0))", "(i=0) \\/ (j=0)"),
]


def main():
    ctx = ("i", "j")
    print(f"{len(critical_substitutions(ctx))} critical substitutions into {ctx}:")
    for q in critical_substitutions(ctx):
        print("   ", q)

    print("\nentailment, solver vs brute force")
    for a, b in CASES:
        fa, fb = parse_cof(a), parse_cof(b)
        ok = entails(fa, fb, ctx)
        line = f"  {a}  |-  {b}:  {ok} (oracle {oracle_entails(fa, fb, ctx)})"
        if not ok:
            line += f", fails at {entailment_witness(fa, fb, ctx)}"
        print(line)

    print("\nquantifiers are eliminated before normal forms are taken")
    for text in ["forall i. (i=0)", "forall i. (i=j) \\/ (j=0)", "forall k. (k=0) \\/ (i=1)"]:
        f = parse_cof(text)
        print(f"  {text:28} ~> {show_cof(forall_elim(f.binder, f.body)):8}  dnf {show_dnf(dnf(f))}")


if __name__ == "__main__":
    main()
