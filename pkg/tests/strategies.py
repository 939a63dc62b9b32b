"""Hypothesis strategies for choreographies, contracts and systems."""
from hypothesis import strategies as st

from chorver.terms import (
    ONE, TAU_ACTION, ZERO, Choice, EndpointScope, EndpointUpdate, FreeOutput,
    Input, Interaction, LocOutput, Par, Scope, Seq, Star, System, Update,
)

roles = st.sampled_from(["p", "q", "r", "s"])
ops = st.sampled_from(["a", "b", "c", "d", "e"])
scope_names = st.sampled_from(["X", "Y"])


@st.composite
def interactions(draw):
    s = draw(roles)
    r = draw(roles.filter(lambda x: x != s))
    return Interaction(draw(ops), s, r)


def _binary(children):
    return st.builds(lambda k, l, r: k(l, r),
                     st.sampled_from([Choice, Seq, Par]), children, children)


def chors(max_leaves=12, units=True, star=True, scopes=False):
    leaf = interactions()
    if units:
        leaf = st.one_of(leaf, st.just(ONE), st.just(ZERO))

    def extend(children):
        opts = [_binary(children)]
        if star:
            opts.append(st.builds(Star, children))
        if scopes:
            opts.append(st.builds(
                lambda n, rs, b, a: Scope(n, frozenset(rs), b, a),
                scope_names, st.sets(roles, min_size=1, max_size=3), children, st.booleans()))
            opts.append(st.builds(Update, scope_names, roles, children))
        return st.one_of(*opts)

    return st.recursive(leaf, extend, max_leaves=max_leaves)


dests = st.sampled_from(["l", "m", "n"])


def contracts(max_leaves=10, persistent=False, free=False, scopes=False, star=True,
              zero=True):
    outs = st.builds(LocOutput, ops, dests)
    if persistent:
        outs = outs.map(lambda o: Seq(TAU_ACTION, o))
    leaves = [st.just(ONE), st.just(TAU_ACTION), st.builds(Input, ops), outs]
    if zero:
        leaves.append(st.just(ZERO))
    if free:
        free_out = st.builds(FreeOutput, ops)
        leaves.append(free_out.map(lambda o: Seq(TAU_ACTION, o)) if persistent else free_out)

    def extend(children):
        opts = [_binary(children)]
        if star:
            opts.append(st.builds(Star, children))
        if scopes:
            opts.append(st.builds(EndpointScope, scope_names, children, st.booleans()))
            opts.append(st.builds(lambda n, b1, b2: EndpointUpdate(n, ("l", "m"), (b1, b2)),
                                  scope_names, children, children))
        return st.one_of(*opts)

    return st.recursive(st.one_of(*leaves), extend, max_leaves=max_leaves)


@st.composite
def systems(draw, n_min=1, n_max=3, max_leaves=6, free=False):
    n = draw(st.integers(n_min, n_max))
    names = ["l", "m", "n"][:n]
    eps = []
    for r in names:
        c = draw(contracts(max_leaves, free=free).filter(
            lambda c, r=r: not any(isinstance(s, LocOutput) and s.dest == r
                                   for s in _walk(c))))
        eps.append((r, c))
    return System(tuple(eps))


def _walk(t):
    from chorver.terms import subterms
    return subterms(t)
