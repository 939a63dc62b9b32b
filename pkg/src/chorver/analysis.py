"""Compliance, implementation, well-formedness, connectedness, output persistence."""
from __future__ import annotations

from collections import deque
from itertools import product

from . import automata
from .projection import PLAIN, project_system
from .semantics import (
    DEFAULT_MAX_STATES, build_lts, chor_lts, chor_steps, contract_lts,
    system_lts,
)
from .syntax import LOCATED, render, render_label, validate_system
from .terms import (
    Choice, EndpointScope, EndpointUpdate, FreeOut, FreeOutput, Input,
    Interaction, LocOut, LocOutput, One, Par, Scope, Seq, Star, Tick, Update,
    Zero, chor_roles, interactions, subterms,
)
from .verdict import Path, Verdict, Violation, Word

# -- compliance ------------------------------------------------------------------


def can_succeed(lts):
    """States from which a tick-enabled state is reachable (tick states included)."""
    pred = lts.predecessors()
    good = set(lts.tick_states())
    queue = deque(good)
    while queue:
        s = queue.popleft()
        for src, _ in pred[s]:
            if src not in good:
                good.add(src)
                queue.append(src)
    return good


def shortest_path(lts, targets):
    """Shortest path from the initial state to any state in ``targets``."""
    parent = {lts.initial: None}
    queue = deque([lts.initial])
    while queue:
        s = queue.popleft()
        if s in targets:
            steps = []
            cur = s
            while parent[cur] is not None:
                prev, lab = parent[cur]
                steps.append((lts.states[prev], lab))
                cur = prev
            return Path(tuple(reversed(steps)), lts.states[s])
        for lab, t in lts.successors(s):
            if t not in parent:
                parent[t] = (s, lab)
                queue.append(t)
    return None


def lts_compliance(lts):
    """Every reachable non-halt state can still reach a tick."""
    good = can_succeed(lts)
    bad = {s for s in range(len(lts.states)) if s not in good and s != lts.halt}
    if not bad:
        return Verdict.ok(reason=f"all {len(lts.states)} states can reach success")
    path = shortest_path(lts, bad)
    return Verdict.fail(path, f"{len(bad)} reachable state(s) cannot reach success")


def check_compliance(p, mode=LOCATED, max_states=DEFAULT_MAX_STATES):
    v = validate_system(p, mode)
    if not v:
        return v
    return lts_compliance(system_lts(p, mode, True, max_states))


def is_compliant(p, mode=LOCATED, max_states=DEFAULT_MAX_STATES):
    """Boolean compliance without validation or witness extraction."""
    lts = system_lts(p, mode, True, max_states)
    good = can_succeed(lts)
    return len(good) + (lts.halt is not None) == len(lts.states)


# -- traces and implementation ------------------------------------------------------

completed_traces = automata.completed_traces


def check_implements(p, h, mode=LOCATED, max_states=DEFAULT_MAX_STATES):
    comp = check_compliance(p, mode, max_states)
    if not comp:
        return Verdict(False, comp.witness,
                       "system is not a correct composition: " + comp.reason,
                       {"compliance": comp})
    left = completed_traces(system_lts(p, mode, True, max_states))
    right = completed_traces(chor_lts(h, max_states))
    word = automata.inclusion_counterexample(left, right)
    if word is not None:
        shown = ", ".join(f"{a.op}: {a.sender}->{a.receiver}" for a in word) or "ε"
        return Verdict(False, Word(word),
                       f"conversation [{shown}] is not admitted by the choreography",
                       {"compliance": comp})
    return Verdict(True, None, "compliant and every conversation is admitted",
                   {"compliance": comp})


def check_well_formed(h, style=PLAIN, max_states=DEFAULT_MAX_STATES):
    return check_implements(project_system(h, style), h, LOCATED, max_states)


# -- connectedness ------------------------------------------------------------------


def can_tick(h):
    return any(isinstance(lab, Tick) for lab, _ in chor_steps(h))


def trans_initial(h):
    if isinstance(h, Interaction):
        return {frozenset((h.sender, h.receiver))}
    if isinstance(h, (One, Zero)):
        return set()
    if isinstance(h, (Par, Choice)):
        return trans_initial(h.left) | trans_initial(h.right)
    if isinstance(h, Seq):
        if can_tick(h.left):
            return trans_initial(h.left) | trans_initial(h.right)
        return trans_initial(h.left)
    if isinstance(h, Star):
        return trans_initial(h.body)
    if isinstance(h, Scope):
        return {frozenset(h.roles)}
    if isinstance(h, Update):
        return {frozenset((h.by,))}
    raise TypeError(f"not a choreography term: {h!r}")


def trans_final(h):
    if isinstance(h, Interaction):
        return {frozenset((h.sender, h.receiver))}
    if isinstance(h, (One, Zero)):
        return set()
    if isinstance(h, (Par, Choice)):
        return trans_final(h.left) | trans_final(h.right)
    if isinstance(h, Seq):
        if can_tick(h.right):
            return trans_final(h.left) | trans_final(h.right)
        return trans_final(h.right)
    if isinstance(h, Star):
        return trans_final(h.body)
    if isinstance(h, Scope):
        return {frozenset(h.roles)}
    if isinstance(h, Update):
        return {frozenset((h.by,))}
    raise TypeError(f"not a choreography term: {h!r}")


def _fmt_family(fam):
    return "{" + ", ".join("{" + ",".join(sorted(r)) + "}"
                           for r in sorted(fam, key=sorted)) + "}"


def connected_for_sequence(h):
    for s in subterms(h):
        if isinstance(s, Seq):
            fin, ini = trans_final(s.left), trans_initial(s.right)
            for r1, r2 in product(sorted(fin, key=sorted), sorted(ini, key=sorted)):
                if not r1 & r2:
                    return Verdict.fail(
                        Violation("connected-for-sequence", s,
                                  f"final {{{','.join(sorted(r1))}}} and initial "
                                  f"{{{','.join(sorted(r2))}}} share no role"),
                        "sequence is not connected")
    return Verdict.ok(reason="every sequence is connected")


def unique_point_of_choice(h):
    for s in subterms(h):
        if isinstance(s, Choice):
            left, right = trans_initial(s.left), trans_initial(s.right)
            for r1, r2 in product(sorted(left, key=sorted), sorted(right, key=sorted)):
                if not r1 & r2:
                    return Verdict.fail(
                        Violation("unique-point-of-choice", s,
                                  f"initial {_fmt_family([r1])} and {_fmt_family([r2])} are disjoint"),
                        "branches do not share an initiating role")
            rl, rr = set(chor_roles(s.left)), set(chor_roles(s.right))
            if rl != rr:
                return Verdict.fail(
                    Violation("unique-point-of-choice", s,
                              f"roles {sorted(rl)} differ from {sorted(rr)}"),
                    "branches involve different roles")
    return Verdict.ok(reason="every choice has a unique point of choice")


def no_operation_interference(h):
    for s in subterms(h):
        if isinstance(s, Par):
            left = {i.op for i in interactions(s.left)}
            right = {i.op for i in interactions(s.right)}
            shared = sorted(left & right)
            if shared:
                return Verdict.fail(
                    Violation("no-operation-interference", s,
                              f"operation(s) {', '.join(shared)} used on both sides"),
                    "parallel branches share an operation name")
    return Verdict.ok(reason="parallel branches use disjoint operations")


def check_connected(h):
    parts = {
        "sequence": connected_for_sequence(h),
        "choice": unique_point_of_choice(h),
        "parallel": no_operation_interference(h),
    }
    failed = [k for k, v in parts.items() if not v]
    if failed:
        first = parts[failed[0]]
        return Verdict(False, first.witness, "violated: " + ", ".join(failed), parts)
    return Verdict(True, None, "all three connectedness conditions hold", parts)


# -- output persistence ----------------------------------------------------------------

NAME_AND_DEST, NAME_ONLY = "name-and-dest", "name"


def _exempt(lab, out, exempt):
    if exempt == NAME_ONLY:
        return isinstance(lab, (LocOut, FreeOut)) and lab.op == out.op
    return lab == out


def check_output_persistent(c, exempt=NAME_AND_DEST, max_states=DEFAULT_MAX_STATES):
    """Once an output is enabled it stays enabled, and tick is off, until it fires."""
    lts = contract_lts(c, max_states)
    for s in range(len(lts.states)):
        succ = lts.successors(s)
        outs = [lab for lab, _ in succ if isinstance(lab, (LocOut, FreeOut))]
        for out in dict.fromkeys(outs):
            for lab, t in succ:
                bad = None
                if isinstance(lab, Tick):
                    bad = "tick is enabled together with the output"
                elif not _exempt(lab, out, exempt) and \
                        out not in [l2 for l2, _ in lts.successors(t)]:
                    bad = "a different transition disables the output"
                if bad:
                    path = shortest_path(lts, {s})
                    steps = path.steps + ((lts.states[s], lab),)
                    return Verdict.fail(
                        Path(steps, lts.states[t]),
                        f"state {render(lts.states[s])} enables {render_label(out)}: {bad}")
    return Verdict.ok(reason=f"output persistent over {len(lts.states)} states")


# -- alphabets and restriction -----------------------------------------------------


def alphabets(c):
    """``(I(C), oroles(C), O(C))`` collected syntactically."""
    ins, oroles, outs = set(), set(), set()
    for s in subterms(c):
        if isinstance(s, Input):
            ins.add(s.op)
        elif isinstance(s, LocOutput):
            oroles.add(s.dest)
            outs.add(s.op)
        elif isinstance(s, FreeOutput):
            outs.add(s.op)
    return frozenset(ins), frozenset(oroles), frozenset(outs)


def input_names(c):
    return alphabets(c)[0]


def output_roles(c):
    return alphabets(c)[1]


def output_names(c):
    return alphabets(c)[2]


def restrict_inputs(c, names):
    """Replace each input on a name in ``names`` by 0."""
    names = frozenset(names)
    if not names:
        return c
    return _restrict(c, names)


def _restrict(c, names):
    if isinstance(c, Input):
        return Zero() if c.op in names else c
    if isinstance(c, (Choice, Seq, Par)):
        return type(c)(_restrict(c.left, names), _restrict(c.right, names))
    if isinstance(c, Star):
        return Star(_restrict(c.body, names))
    if isinstance(c, EndpointScope):
        return EndpointScope(c.name, _restrict(c.body, names), c.active)
    if isinstance(c, EndpointUpdate):
        return EndpointUpdate(c.target, c.roles,
                              tuple(_restrict(b, names) for b in c.bodies))
    return c
