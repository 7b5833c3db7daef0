"""Solve a generated ontology instance and its inconsistent variant."""

import argparse
import time

from setcsp.formula import compile_instance
from setcsp.oracle import eval_block_model
from setcsp.outer_res import replay_trace, solve_instance
from setcsp.reduction import reduce_language
from setcsp.workloads import OntologyConfig, ontology_instance


def solve(cfg: OntologyConfig) -> None:
    t0 = time.perf_counter()
    inst = ontology_instance(cfg)
    t1 = time.perf_counter()
    out = solve_instance(inst, reduce_language(inst.defs))
    t2 = time.perf_counter()
    if out.sat:
        ok = eval_block_model(compile_instance(inst), out.model)
        verdict = f"SAT, {out.model.s} blocks, witness {'verified' if ok else 'FAILED'}"
    else:
        ok = replay_trace(out.formula, out.trace)
        verdict = f"UNSAT, trace {'replays' if ok else 'FAILED'}"
    print(
        f"links={cfg.links} inconsistent={cfg.inconsistent} constraints={len(inst.constraints)}: "
        f"{verdict} (parse {t1 - t0:.2f}s, solve {t2 - t1:.2f}s)"
    )


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--links", type=int, default=1667)
    a = p.parse_args()
    for inconsistent in (False, True):
        solve(OntologyConfig(a.links, inconsistent))


if __name__ == "__main__":
    main()
