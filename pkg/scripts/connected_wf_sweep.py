"""Sweep random connected choreographies and report those that are not well formed.

Each failure is printed with its shortest unadmitted conversation. Usage:

    python3 scripts/connected_wf_sweep.py --seeds 0 1 2 --n 200
"""
import argparse
import time

from chorver.analysis import check_well_formed
from chorver.randgen import connected_sample
from chorver.syntax import render
from chorver.verdict import witness_json


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, nargs="+", default=[0, 1, 2])
    ap.add_argument("--n", type=int, default=200)
    ap.add_argument("--max-height", type=int, default=4)
    ap.add_argument("--show", type=int, default=3, help="failures printed per seed")
    a = ap.parse_args()
    total = bad_total = 0
    for seed in a.seeds:
        t0 = time.perf_counter()
        sample, tries = connected_sample(a.n, seed, a.max_height)
        bad = [(h, v) for h in sample if not (v := check_well_formed(h))]
        dt = time.perf_counter() - t0
        total += len(sample)
        bad_total += len(bad)
        print(f"seed {seed}: {len(bad)}/{len(sample)} not well formed "
              f"({tries} generated, {dt:.2f}s)")
        for h, v in sorted(bad, key=lambda hv: len(render(hv[0])))[:a.show]:
            word = ", ".join(witness_json(v.witness)["word"])
            print(f"  {render(h)}\n    unadmitted: {word}")
    print(f"total: {bad_total}/{total} not well formed")


if __name__ == "__main__":
    main()
