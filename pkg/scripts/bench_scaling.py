"""Time the solver on the chain family and report doubling ratios."""

import argparse
import gc
import time
from dataclasses import dataclass

from setcsp.outer_res import solve_instance
from setcsp.reduction import reduce_language
from setcsp.workloads import ChainConfig, chain_instance


@dataclass
class BenchConfig:
    sizes: tuple[int, ...] = (1000, 2000, 4000, 8000)
    repeats: int = 3
    naive: bool = False


def run(cfg: BenchConfig) -> dict[int, float]:
    times = {}
    for n in cfg.sizes:
        inst = chain_instance(ChainConfig(n))
        best = float("inf")
        gc.disable()
        try:
            for _ in range(cfg.repeats):
                t0 = time.perf_counter()
                out = solve_instance(inst, reduce_language(inst.defs), naive=cfg.naive)
                best = min(best, time.perf_counter() - t0)
        finally:
            gc.enable()
        times[n] = best
        st = out.stats
        print(
            f"n={n:6d}  {best:8.3f}s  passes={st.iterations}  inner_res_calls={st.inner_res_calls}  "
            f"retests_skipped={st.retests_skipped}"
        )
    ns = list(times)
    for a, b in zip(ns, ns[1:]):
        print(f"time({b})/time({a}) = {times[b] / times[a]:.2f}")
    return times


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--sizes", type=int, nargs="+", default=list(BenchConfig.sizes))
    p.add_argument("--repeats", type=int, default=BenchConfig.repeats)
    p.add_argument("--naive", action="store_true", help="re-test every inner clause each pass")
    a = p.parse_args()
    run(BenchConfig(tuple(a.sizes), a.repeats, a.naive))


if __name__ == "__main__":
    main()
