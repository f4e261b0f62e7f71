"""Compare the compiled and pure-Python walk and coupling kernels.

    python3 benchmarks/bench_kernels.py [--walks N] [--pairs N] [--repeat R]

Both backends run the same seeded streams; the script also checks that
their outputs are bit-identical.
"""

import argparse
import json
import time

from redwalk import kernels
from redwalk.triangle_group import pgl2_config
from redwalk.walk import pack_params, walk_stream


def best_of(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--walks", type=int, default=2000)
    ap.add_argument("--pairs", type=int, default=2000)
    ap.add_argument("--mmax", type=int, default=40)
    ap.add_argument("--budget", type=int, default=10_000)
    ap.add_argument("--target", type=float, default=1e-9)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    cfg = pgl2_config()
    params = pack_params(cfg)
    circles = ([c.c.real for c in cfg.circles], [c.c.imag for c in cfg.circles],
               [c.r for c in cfg.circles])
    backends = {"python": kernels.python}
    compiled = kernels.compiled()
    if compiled is not None:
        backends["cython"] = compiled

    results = {}
    for name, mod in backends.items():
        walk_t, walk_out = best_of(lambda: mod.walk_batch(
            params, [walk_stream(1, k) for k in range(args.walks)], args.budget, args.target), args.repeat)
        coup_t, coup_out = best_of(lambda: mod.coupling_batch(
            circles, [walk_stream(1, k, domain=1) for k in range(args.pairs)], args.mmax), args.repeat)
        steps = sum(o[1] for o in walk_out)
        results[name] = {
            "walk_seconds": walk_t,
            "walks_per_second": args.walks / walk_t,
            "steps_per_second": steps / walk_t,
            "coupling_seconds": coup_t,
            "pairs_per_second": args.pairs / coup_t,
            "_walk": walk_out,
            "_coupling": [list(r) for r in coup_out],
        }

    report = {"walks": args.walks, "pairs": args.pairs, "mmax": args.mmax, "budget": args.budget,
              "target": args.target}
    if "cython" in results:
        py, cy = results["python"], results["cython"]
        report["bit_identical"] = py["_walk"] == cy["_walk"] and py["_coupling"] == cy["_coupling"]
        report["walk_speedup"] = py["walk_seconds"] / cy["walk_seconds"]
        report["coupling_speedup"] = py["coupling_seconds"] / cy["coupling_seconds"]
    for name, r in results.items():
        report[name] = {k: round(v, 6) for k, v in r.items() if not k.startswith("_")}
    print(json.dumps(report, indent=2))


if __name__ == "__main__":
    main()
