"""Run the bounded subcontract check on every pair file in a directory.

Refutations are re-verified by two compliance runs. Usage:

    python3 scripts/refinement_replay.py corpus/pairs --depth 3
"""
import argparse
import time
from pathlib import Path

from chorver.cli import parse_pair
from chorver.refinement import (
    Knowledge, NameSet, RefinementQuery, Refuted, check_subcontract_bounded,
    replay_refutation,
)
from chorver.syntax import LOCATED, parse_contract, render


def query_of(pair, depth=None):
    know = None
    if "test_inputs" in pair or "test_outputs" in pair:
        know = Knowledge(NameSet.parse(pair.get("test_inputs", "*")),
                         NameSet.parse(pair.get("test_outputs", "*")))
    return RefinementQuery(parse_contract(pair["candidate"]), parse_contract(pair["reference"]),
                           pair["role"], know, depth or int(pair.get("depth", 3)),
                           mode=pair.get("mode", LOCATED))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("directory", type=Path)
    ap.add_argument("--depth", type=int, help="override the depth in each pair file")
    a = ap.parse_args()
    for path in sorted(a.directory.glob("*.pair")):
        query = query_of(parse_pair(path.read_text()), a.depth)
        t0 = time.perf_counter()
        v = check_subcontract_bounded(query)
        dt = time.perf_counter() - t0
        if isinstance(v, Refuted):
            ok = "replays" if replay_refutation(query, v) else "DOES NOT REPLAY"
            print(f"{path.name}: refuted by {render(v.test)} ({ok}, {dt:.2f}s)")
        else:
            print(f"{path.name}: no counterexample up to depth {v.depth} "
                  f"({v.tests_tried} tests, {dt:.2f}s){' ' + v.note if v.note else ''}")


if __name__ == "__main__":
    main()
