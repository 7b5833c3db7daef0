"""Print EI membership verdicts for the example catalog and disjunctive disequality forms."""

import argparse

from setcsp.catalog import EXAMPLES, dj_forms, example, relation
from setcsp.membership import check_membership, search_ei_counterexample


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--atoms", type=int, default=1, help="atom budget for the guard search")
    p.add_argument("--max-k", type=int, default=3, help="largest number of disequality disjuncts")
    a = p.parse_args()
    rows = [(name, example(name), expected) for name, (_, expected) in EXAMPLES.items()]
    rows += [(name, relation(text), True) for name, text in dj_forms(a.max_k).items()]
    mismatches = 0
    for name, rdef, expected in rows:
        v = check_membership(rdef, m=a.atoms)
        mark = "ok" if v.member == expected else "MISMATCH"
        mismatches += v.member != expected
        print(f"{mark:8s} {v.report()}")
        if not v.member:
            cx = search_ei_counterexample(rdef.formula(), a.atoms)
            if cx is not None:
                print("\n".join("         " + line for line in cx.report().splitlines()))
    print(f"{len(rows)} relations, {mismatches} mismatches")


if __name__ == "__main__":
    main()
