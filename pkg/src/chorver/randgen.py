"""Seeded random term generators shared by the test suites and the sweep scripts.

Heights follow ``terms.depth``: a leaf has height 1.
"""
from __future__ import annotations

import random

from .terms import (
    ONE, TAU_ACTION, ZERO, Choice, Input, Interaction, LocOutput, Par, Seq, Star,
    System,
)

ROLES = ("p", "q", "r", "s")
OPS = ("a", "b", "c", "d", "e")


def _pick_height(rng, max_height):
    return rng.randint(1, max_height)


def random_chor(rng: random.Random, max_height=4, roles=ROLES, ops=OPS,
                star=True, units=False):
    """A choreography of height <= ``max_height`` without scopes."""
    def go(h):
        if h <= 1:
            if units and rng.random() < 0.1:
                return rng.choice((ONE, ZERO))
            s, r = rng.sample(roles, 2)
            return Interaction(rng.choice(ops), s, r)
        kinds = ["+", ";", "|"] + (["*"] if star else [])
        k = rng.choice(kinds)
        if k == "*":
            return Star(go(h - 1))
        ctor = {"+": Choice, ";": Seq, "|": Par}[k]
        # one side keeps the full height so sizes do not collapse to leaves
        hl, hr = h - 1, rng.randint(1, h - 1)
        if rng.random() < 0.5:
            hl, hr = hr, hl
        return ctor(go(hl), go(hr))

    return go(_pick_height(rng, max_height))


def random_contract(rng: random.Random, max_height=4, ops=OPS, dests=("l", "m"),
                    persistent=False, zero=True, star=True, par=True):
    """A located contract; with ``persistent`` every output is tau-guarded."""
    kinds = ["one", "tau", "in"] + (["out"] if dests else []) + (["zero"] if zero else [])

    def leaf():
        k = rng.choice(kinds)
        if k == "one":
            return ONE
        if k == "tau":
            return TAU_ACTION
        if k == "in":
            return Input(rng.choice(ops))
        if k == "out":
            out = LocOutput(rng.choice(ops), rng.choice(dests))
            return Seq(TAU_ACTION, out) if persistent else out
        return ZERO

    def go(h):
        if h <= 1:
            return leaf()
        kinds = ["+", ";"] + (["|"] if par else []) + (["*"] if star else [])
        k = rng.choice(kinds)
        if k == "*":
            return Star(go(h - 1))
        ctor = {"+": Choice, ";": Seq, "|": Par}[k]
        return ctor(go(h - 1), go(rng.randint(1, h - 1)))

    return go(_pick_height(rng, max_height))


def random_system(rng: random.Random, n_roles=3, max_height=3, ops=("a", "b", "c")):
    """A located system whose outputs only target other roles of the system."""
    roles = [f"r{i}" for i in range(n_roles)]
    eps = []
    for r in roles:
        others = tuple(x for x in roles if x != r)
        eps.append((r, random_contract(rng, max_height, ops, others, zero=False)))
    return System(tuple(eps))


def connected_sample(n, seed=0, max_height=4, roles=ROLES, ops=OPS, max_tries=100_000):
    """The first ``n`` generated choreographies passing ``check_connected``."""
    from .analysis import check_connected

    rng = random.Random(seed)
    out, tries = [], 0
    while len(out) < n and tries < max_tries:
        tries += 1
        h = random_chor(rng, max_height, roles, ops)
        if check_connected(h):
            out.append(h)
    return out, tries
