"""Compliance testing: bounded subcontract search, controllability, consonance, NF export.

The subcontract relation quantifies over every test.  Here the tests are
enumerated up to a depth bound, so a refutation is definitive while the
absence of one is evidence only up to that bound.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import combinations_with_replacement, product
from typing import Optional

from .analysis import (
    alphabets, check_compliance, check_well_formed, is_compliant,
    restrict_inputs,
)
from .projection import OUTPUT_PERSISTENT, project_role
from .semantics import StateBoundExceeded, contract_lts
from .syntax import LOCATED, UNLOCATED, render, render_label
from .terms import (
    ONE, TAU_ACTION, Choice, FreeIn, FreeOutput, Input, LocOutput, One, Seq,
    System, Tau, TauLabel, Tick, Zero,
)
from .verdict import Verdict, Violation

log = logging.getLogger(__name__)

TEST_MAX_STATES = 20_000


@dataclass(frozen=True)
class NameSet:
    """A set of operation names, possibly given as a complement (``N - {b}``)."""
    names: frozenset = frozenset()
    complement: bool = True

    def __contains__(self, name):
        return (name in self.names) != self.complement

    @classmethod
    def parse(cls, text):
        text = text.strip()
        if text in ("", "*"):
            return ALL_NAMES
        if text[0] in "~-":
            return cls(frozenset(x.strip() for x in text[1:].split(",") if x.strip()), True)
        return cls(frozenset(x.strip() for x in text.split(",") if x.strip()), False)

    def __str__(self):
        inner = ",".join(sorted(self.names))
        return f"N-{{{inner}}}" if self.complement else f"{{{inner}}}"


ALL_NAMES = NameSet()


@dataclass(frozen=True)
class Knowledge:
    test_inputs: NameSet = ALL_NAMES
    test_outputs: NameSet = ALL_NAMES


@dataclass
class RefinementQuery:
    candidate: object
    reference: object
    role: str
    knowledge: Optional[Knowledge] = None
    depth: int = 3
    test_roles: Optional[int] = None
    mode: str = LOCATED

    def __post_init__(self):
        if self.depth < 1:
            raise ValueError("depth must be at least 1")
        bad = (alphabets(self.candidate)[1] | alphabets(self.reference)[1]) & {self.role}
        if bad:
            raise ValueError(f"role {self.role} occurs as an output destination")
        if self.test_roles is None:
            self.test_roles = 3 if self.mode == UNLOCATED else 2


@dataclass(frozen=True)
class Refuted:
    test: System

    holds = False

    def __bool__(self):
        return False


@dataclass(frozen=True)
class NoCounterexampleUpTo:
    depth: int
    tests_tried: int
    skipped: int = 0
    note: str = ""

    holds = True

    def __bool__(self):
        return True


# -- test enumeration ---------------------------------------------------------------


def _can_finish(t):
    """Whether a test tree (no star, no parallel) can reach a tick on its own."""
    if isinstance(t, One):
        return True
    if isinstance(t, Zero):
        return False
    if isinstance(t, Choice):
        return _can_finish(t.left) or _can_finish(t.right)
    if isinstance(t, Seq):
        return _can_finish(t.left) and _can_finish(t.right)
    return True


class _Trees:
    """+ / ; trees over ``atoms``, built lazily one height level at a time."""

    def __init__(self, atoms):
        self.levels = [[a for a in dict.fromkeys(atoms) if _can_finish(a)]]
        self._all = [list(dict.fromkeys(atoms))]

    def level(self, d):
        """Finishing trees of height exactly ``d`` (1-based)."""
        while len(self._all) < d:
            pool = [t for lv in self._all for t in lv]
            prev = set(self._all[-1])
            new = []
            for ctor in (Choice, Seq):
                for x, y in product(pool, repeat=2):
                    if x in prev or y in prev:
                        new.append(ctor(x, y))
            new = list(dict.fromkeys(new))
            self._all.append(new)
            self.levels.append([t for t in new if _can_finish(t)])
        return self.levels[d - 1]

    def upto(self, d):
        return [t for k in range(1, d + 1) for t in self.level(k)]


def _fresh_roles(n, taken):
    out, i = [], 1
    while len(out) < n:
        name = f"t{i}"
        if name not in taken:
            out.append(name)
        i += 1
    return out


def test_plan(q):
    """Slots of a test: ``(named_roles, fresh_roles, atoms_for(role))``."""
    cand_in, cand_or, cand_out = alphabets(q.candidate)
    ref_in, ref_or, ref_out = alphabets(q.reference)
    know = q.knowledge or Knowledge()
    named = sorted((ref_or | cand_or) - {q.role})
    extra = max(q.test_roles - len(named), 0)
    if not named:
        extra = max(extra, 1)
    fresh = _fresh_roles(extra, set(named) | {q.role})

    def located_sent_to(role):
        from .terms import subterms
        names = set()
        for c in (q.candidate, q.reference):
            for s in subterms(c):
                if isinstance(s, LocOutput) and s.dest == role:
                    names.add(s.op)
        return names

    if q.mode == LOCATED:
        out_names = sorted(n for n in ref_in if n in know.test_outputs)

        def atoms(role):
            a = [ONE]
            a += [Seq(TAU_ACTION, LocOutput(n, q.role)) for n in out_names]
            # inputs nobody can ever send to this role are pruned
            heard = located_sent_to(role)
            a += [Input(n) for n in sorted(ref_out | cand_out)
                  if n in heard and n in know.test_inputs]
            return a
    else:
        universe = ref_in | cand_in | ref_out | cand_out
        out_names = sorted(n for n in universe if n in know.test_outputs)
        sendable = set(out_names) | ref_out | cand_out

        def atoms(role):
            a = [ONE]
            a += [Seq(TAU_ACTION, FreeOutput(n)) for n in out_names]
            heard = sendable | located_sent_to(role)
            a += [Input(n) for n in sorted(universe | located_sent_to(role))
                  if n in heard and n in know.test_inputs]
            return a
    return named, fresh, atoms


def enumerate_tests(q):
    """Deterministic stream of test systems for ``q``.

    Ordered by number of endpoints, then by the largest tree height, so the
    smallest refutations surface first.  Endpoints at fresh roles are
    interchangeable and therefore enumerated as multisets.
    """
    named, fresh, atoms = test_plan(q)
    trees = {}

    def trees_for(role):
        if role not in trees:
            trees[role] = _Trees(atoms(role))
        return trees[role]

    seen = set()
    min_k = max(len(named), 1)
    for k in range(min_k, len(named) + len(fresh) + 1):
        n_fresh = k - len(named)
        for d in range(1, q.depth + 1):
            named_pools = [trees_for(r).upto(d) for r in named]
            fresh_pool = trees_for(fresh[0]).upto(d) if n_fresh else []
            for assign in product(*named_pools):
                for multi in combinations_with_replacement(fresh_pool, n_fresh):
                    chosen = list(assign) + list(multi)
                    if max(_height(t) for t in chosen) != d:
                        continue
                    sys = System(tuple(zip(named + fresh[:n_fresh], chosen)))
                    if sys not in seen:
                        seen.add(sys)
                        yield sys


_HEIGHTS = {}


def _height(t):
    h = _HEIGHTS.get(t)
    if h is None:
        if isinstance(t, (Choice,)) or (isinstance(t, Seq) and not _is_out_atom(t)):
            h = 1 + max(_height(t.left), _height(t.right))
        else:
            h = 1
        _HEIGHTS[t] = h
    return h


def _is_out_atom(t):
    return isinstance(t, Seq) and isinstance(t.left, Tau) and \
        isinstance(t.right, (LocOutput, FreeOutput))


# -- subcontract ----------------------------------------------------------------------


def _with(role, contract, test):
    return System(((role, contract),) + test.endpoints)


def check_subcontract_bounded(q, normalize=True, max_states=TEST_MAX_STATES):
    """Search for a test compliant with the reference but not with the candidate."""
    ref_in = alphabets(q.reference)[0]
    candidate = q.candidate
    if normalize and q.mode == LOCATED:
        candidate = restrict_inputs(candidate, alphabets(candidate)[0] - ref_in)

    if q.mode == LOCATED:
        cert = uncontrollability_certificate(q.reference)
        if cert is not None:
            return NoCounterexampleUpTo(
                q.depth, 0, 0, "reference has no compliant test at any depth: " + cert)

    tried = skipped = 0
    for test in enumerate_tests(q):
        tried += 1
        try:
            if not is_compliant(_with(q.role, q.reference, test), q.mode, max_states):
                continue
            if not is_compliant(_with(q.role, candidate, test), q.mode, max_states):
                log.debug("refuted after %d tests by %s", tried, render(test))
                return Refuted(test)
        except StateBoundExceeded:
            skipped += 1
    return NoCounterexampleUpTo(q.depth, tried, skipped)


def replay_refutation(q, verdict):
    """Re-verify a refutation with two independent compliance runs."""
    ok_ref = check_compliance(_with(q.role, q.reference, verdict.test), q.mode)
    bad_cand = check_compliance(_with(q.role, q.candidate, verdict.test), q.mode)
    return bool(ok_ref) and not bad_cand


# -- controllability --------------------------------------------------------------------


def uncontrollability_certificate(c, max_states=TEST_MAX_STATES):
    """Reason why no located-mode test can ever be compliant with ``c``, or None.

    Only attempted for contracts without outputs, where a test learns nothing
    about the contract beyond which of its own outputs were consumed.  Knowledge
    sets (all states consistent with the consumed word) are explored; a set
    holding a doomed state, or both a mute state that can never accept input
    and a needy state that cannot finish without input, is a dead end for
    every test.  If no live knowledge set contains a state that can finish,
    the contract is uncontrollable.
    """
    ins, _, outs = alphabets(c)
    if outs:
        return None
    try:
        lts = contract_lts(c, max_states)
    except StateBoundExceeded:
        return None
    n = len(lts.states)
    labels = {lab for _, lab, _ in lts.transitions}
    if any(not isinstance(lab, (TauLabel, FreeIn, Tick)) for lab in labels):
        return None

    succ = {s: lts.successors(s) for s in range(n)}

    def tau_closure(states):
        seen = set(states)
        stack = list(states)
        while stack:
            s = stack.pop()
            for lab, t in succ[s]:
                if isinstance(lab, TauLabel) and t not in seen:
                    seen.add(t)
                    stack.append(t)
        return frozenset(seen)

    can_tick_now = {s for s in range(n) if any(isinstance(l, Tick) for l, _ in succ[s])}
    finishers = set(can_tick_now)
    changed = True
    while changed:
        changed = False
        for src, lab, dst in lts.transitions:
            if dst in finishers and src not in finishers:
                finishers.add(src)
                changed = True
    if lts.initial not in finishers:
        return "the contract can never terminate successfully"

    def mute(s):
        return not any(isinstance(l, FreeIn) for t in tau_closure({s}) for l, _ in succ[t])

    def needy(s):
        return not (tau_closure({s}) & can_tick_now)

    def dead_end(k):
        if any(s not in finishers for s in k):
            return True
        return any(mute(s) for s in k) and any(needy(s) for s in k)

    start = tau_closure({lts.initial})
    seen = {start}
    stack = [start]
    while stack:
        k = stack.pop()
        if dead_end(k):
            continue
        if k & can_tick_now:
            return None
        for a in sorted(ins):
            nxt = tau_closure({t for s in k for lab, t in succ[s]
                               if isinstance(lab, FreeIn) and lab.op == a})
            if nxt and nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return "every consumed word leads to an ambiguous state set (mute vs needy)"


def check_controllable_bounded(c, role, depth=3, mode=LOCATED, test_roles=None,
                               max_states=TEST_MAX_STATES):
    if mode == LOCATED:
        cert = uncontrollability_certificate(c)
        if cert is not None:
            return Verdict.fail(Violation("uncontrollable", c, cert),
                                f"no compliant test up to depth {depth} ({cert})")
    q = RefinementQuery(c, c, role, None, depth, test_roles, mode)
    tried = 0
    for test in enumerate_tests(q):
        tried += 1
        try:
            if is_compliant(_with(role, c, test), mode, max_states):
                return Verdict.ok(test, f"compliant test found after {tried} candidates")
        except StateBoundExceeded:
            continue
    return Verdict.fail(Violation("uncontrollable", c, f"{tried} tests tried"),
                        f"no compliant test up to depth {depth}")


# -- consonance ---------------------------------------------------------------------------


def check_consonance_bounded(c, role, h, depth=2, test_roles=None,
                             max_states=TEST_MAX_STATES):
    wf = check_well_formed(h, OUTPUT_PERSISTENT)
    if not wf:
        raise ValueError("choreography is not well formed under output-persistent "
                         "projection: " + wf.reason)
    reference = project_role(h, role, OUTPUT_PERSISTENT)
    candidate = restrict_inputs(c, alphabets(c)[0] - alphabets(reference)[0])
    q = RefinementQuery(candidate, reference, role, None, depth, test_roles, LOCATED)
    return check_subcontract_bounded(q, max_states=max_states)


# -- normal form ----------------------------------------------------------------------------


@dataclass
class EquationSystem:
    """``X_i = sum_j label_ij ; X_der(i,j)``, X1 being the initial state."""
    equations: list = field(default_factory=list)   # [[(label, target_index)]]

    def __len__(self):
        return len(self.equations)

    def lines(self):
        out = []
        for i, summands in enumerate(self.equations, 1):
            rhs = " + ".join(f"{render_label(lab)};X{j + 1}" for lab, j in summands) or "0"
            out.append(f"X{i} = {rhs}")
        return out

    def __str__(self):
        return "\n".join(self.lines())


def normal_form(c, max_states=100_000):
    lts = contract_lts(c, max_states)
    eqs = [[] for _ in lts.states]
    for src, lab, dst in lts.transitions:
        eqs[src].append((lab, dst))
    return EquationSystem(eqs)
