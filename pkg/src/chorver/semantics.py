"""Small-step semantics for choreographies, contracts and systems, plus LTS closure.

Every stepper returns a list of ``(label, successor)`` pairs without
duplicates, in an order that depends only on the term (never on hash
randomization), so LTS state numbering is reproducible across runs.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from typing import Optional

from .syntax import LOCATED, UNLOCATED
from .terms import (
    ONE, TAU, TICK, ZERO, ChorUpd, Choice, EndpointScope, EndpointUpdate,
    FreeIn, FreeOut, FreeOutput, Input, InputAt, Interact, Interaction, LocOut,
    LocOutput, One, Par, Scope, ScopeEnd, ScopeStart, Seq, Star, SysUpd,
    System, Tau, TauLabel, Tick, Update, Zero,
)

DEFAULT_MAX_STATES = 100_000


class StateBoundExceeded(RuntimeError):
    def __init__(self, max_states):
        self.max_states = max_states
        super().__init__(f"state space exceeds bound of {max_states} states")


def _uniq(pairs):
    return list(dict.fromkeys(pairs))


# -- scope substitution (shared with the updates module) ----------------------

def substitute_scope(h, name, body):
    """Replace the body of every scope ``name`` in ``h``, skipping update bodies."""
    if isinstance(h, Scope):
        if h.name == name:
            return Scope(h.name, h.roles, body, h.active)
        new = substitute_scope(h.body, name, body)
        return h if new is h.body else Scope(h.name, h.roles, new, h.active)
    if isinstance(h, (Choice, Seq, Par)):
        left = substitute_scope(h.left, name, body)
        right = substitute_scope(h.right, name, body)
        if left is h.left and right is h.right:
            return h
        return type(h)(left, right)
    if isinstance(h, Star):
        new = substitute_scope(h.body, name, body)
        return h if new is h.body else Star(new)
    return h


def _subst_label(term, lab):
    if isinstance(lab, ChorUpd):
        return substitute_scope(term, lab.scope, lab.body)
    return term


# -- choreographies ------------------------------------------------------------

@lru_cache(maxsize=1 << 16)
def _chor_steps(h):
    if isinstance(h, Interaction):
        return ((Interact(h.op, h.sender, h.receiver), ONE),)
    if isinstance(h, One):
        return ((TICK, ZERO),)
    if isinstance(h, Zero):
        return ()
    if isinstance(h, Update):
        return ((ChorUpd(h.target, h.by, h.body), ONE),)
    if isinstance(h, Choice):
        return tuple(_uniq(_chor_steps(h.left) + _chor_steps(h.right)))
    out = []
    if isinstance(h, Seq):
        for lab, l2 in _chor_steps(h.left):
            if isinstance(lab, Tick):
                out.extend(_chor_steps(h.right))
            else:
                out.append((lab, Seq(l2, _subst_label(h.right, lab))))
    elif isinstance(h, Par):
        left, right = _chor_steps(h.left), _chor_steps(h.right)
        for lab, l2 in left:
            if not isinstance(lab, Tick):
                out.append((lab, Par(l2, _subst_label(h.right, lab))))
        for lab, r2 in right:
            if not isinstance(lab, Tick):
                out.append((lab, Par(_subst_label(h.left, lab), r2)))
        for (lab1, l2), (lab2, r2) in product(left, right):
            if isinstance(lab1, Tick) and isinstance(lab2, Tick):
                out.append((TICK, Par(l2, r2)))
    elif isinstance(h, Star):
        out.append((TICK, ZERO))
        for lab, b2 in _chor_steps(h.body):
            if not isinstance(lab, Tick):
                out.append((lab, Seq(b2, Star(_subst_label(h.body, lab)))))
    elif isinstance(h, Scope):
        for lab, b2 in _chor_steps(h.body):
            if isinstance(lab, ChorUpd) and lab.scope == h.name:
                out.append((lab, Scope(h.name, h.roles, lab.body, h.active)))
            else:
                out.append((lab, Scope(h.name, h.roles, b2, h.active)))
    else:
        raise TypeError(f"not a choreography term: {h!r}")
    return tuple(_uniq(out))


def chor_steps(h):
    """All transitions of a choreography, including the update rules."""
    return list(_chor_steps(h))


# -- contracts -----------------------------------------------------------------

@lru_cache(maxsize=1 << 18)
def _orch_steps(c):
    if isinstance(c, One):
        return ((TICK, ZERO),)
    if isinstance(c, Zero):
        return ()
    if isinstance(c, Tau):
        return ((TAU, ONE),)
    if isinstance(c, Input):
        return ((FreeIn(c.op), ONE),)
    if isinstance(c, LocOutput):
        return ((LocOut(c.op, c.dest), ONE),)
    if isinstance(c, FreeOutput):
        return ((FreeOut(c.op), ONE),)
    if isinstance(c, EndpointUpdate):
        return ((SysUpd(c.target, c.roles, c.bodies), ONE),)
    if isinstance(c, Choice):
        return tuple(_uniq(_orch_steps(c.left) + _orch_steps(c.right)))
    out = []
    if isinstance(c, Seq):
        for lab, l2 in _orch_steps(c.left):
            if isinstance(lab, Tick):
                out.extend(_orch_steps(c.right))
            else:
                out.append((lab, Seq(l2, c.right)))
    elif isinstance(c, Par):
        left, right = _orch_steps(c.left), _orch_steps(c.right)
        for lab, l2 in left:
            if not isinstance(lab, Tick):
                out.append((lab, Par(l2, c.right)))
        for lab, r2 in right:
            if not isinstance(lab, Tick):
                out.append((lab, Par(c.left, r2)))
        for (lab1, l2), (lab2, r2) in product(left, right):
            if isinstance(lab1, Tick) and isinstance(lab2, Tick):
                out.append((TICK, Par(l2, r2)))
    elif isinstance(c, Star):
        out.append((TICK, ZERO))
        for lab, b2 in _orch_steps(c.body):
            if not isinstance(lab, Tick):
                out.append((lab, Seq(b2, c)))
    elif isinstance(c, EndpointScope):
        if not c.active:
            out.append((ScopeStart(c.name), EndpointScope(c.name, c.body, True)))
        else:
            can_end = False
            for lab, b2 in _orch_steps(c.body):
                if isinstance(lab, Tick):
                    can_end = True
                else:
                    out.append((lab, EndpointScope(c.name, b2, True)))
            if can_end:
                out.append((ScopeEnd(c.name), ONE))
    else:
        raise TypeError(f"not a contract term: {c!r}")
    return tuple(_uniq(out))


def orch_steps(c):
    """All transitions of a single contract (Table-2 rules plus endpoint scopes)."""
    return list(_orch_steps(c))


# -- systems -------------------------------------------------------------------

def _scope_names(c):
    """Names of endpoint scopes in ``c``, not looking inside update bodies."""
    names = []
    stack = [c]
    while stack:
        t = stack.pop()
        if isinstance(t, EndpointScope):
            names.append(t.name)
            stack.append(t.body)
        elif isinstance(t, (Choice, Seq, Par)):
            stack.extend((t.right, t.left))
        elif isinstance(t, Star):
            stack.append(t.body)
    return names


def replace_scope_body(c, name, body):
    """Endpoint-level counterpart of ``substitute_scope``."""
    if isinstance(c, EndpointScope):
        if c.name == name:
            return EndpointScope(name, body, c.active)
        new = replace_scope_body(c.body, name, body)
        return c if new is c.body else EndpointScope(c.name, new, c.active)
    if isinstance(c, (Choice, Seq, Par)):
        left = replace_scope_body(c.left, name, body)
        right = replace_scope_body(c.right, name, body)
        if left is c.left and right is c.right:
            return c
        return type(c)(left, right)
    if isinstance(c, Star):
        new = replace_scope_body(c.body, name, body)
        return c if new is c.body else Star(new)
    return c


def apply_sys_update(p, lab):
    """Install ``lab.bodies`` as the body of scope ``lab.scope`` at each listed role."""
    eps = list(p.endpoints)
    for role, body in zip(lab.roles, lab.bodies):
        for i, (r, c) in enumerate(eps):
            if r == role:
                eps[i] = (r, replace_scope_body(c, lab.scope, body))
    return System(tuple(eps))


def sys_steps(p, mode=LOCATED, closed=True):
    """Transitions of a system of located contracts.

    With ``closed`` only tau, tick, completed interactions and the scope
    barrier / update labels are produced.
    """
    return list(_sys_steps(p, mode, closed))


@lru_cache(maxsize=1 << 16)
def _sys_steps(p, mode, closed):
    eps = p.endpoints
    steps = [_orch_steps(c) for _, c in eps]
    out = []

    for i, (role, _) in enumerate(eps):
        for lab, c2 in steps[i]:
            if isinstance(lab, TauLabel):
                out.append((TAU, p.replace(i, c2)))
            elif isinstance(lab, SysUpd):
                out.append((lab, apply_sys_update(p.replace(i, c2), lab)))
            elif closed:
                continue
            elif isinstance(lab, FreeIn):
                out.append((InputAt(lab.op, role), p.replace(i, c2)))
            elif isinstance(lab, LocOut):
                out.append((LocOut(lab.op, lab.dest, role), p.replace(i, c2)))
            elif isinstance(lab, FreeOut):
                out.append((FreeOut(lab.op, role), p.replace(i, c2)))

    # binary synchronization: receiver i, sender j
    for i, (recv, _) in enumerate(eps):
        ins = [(lab, c2) for lab, c2 in steps[i] if isinstance(lab, FreeIn)]
        if not ins:
            continue
        for j, (send, _) in enumerate(eps):
            if i == j:
                continue
            for olab, d2 in steps[j]:
                if isinstance(olab, LocOut):
                    if olab.dest != recv:
                        continue
                elif isinstance(olab, FreeOut):
                    if mode != UNLOCATED:
                        continue
                else:
                    continue
                for ilab, c2 in ins:
                    if ilab.op == olab.op:
                        q = p.replace(i, c2).replace(j, d2)
                        out.append((Interact(olab.op, send, recv), q))

    # scope barriers: every endpoint mentioning X must move together
    names = []
    for _, c in eps:
        names.extend(_scope_names(c))
    for name in dict.fromkeys(names):
        members = [i for i, (_, c) in enumerate(eps) if name in _scope_names(c)]
        for kind in (ScopeStart, ScopeEnd):
            options = []
            for i in members:
                succ = [c2 for lab, c2 in steps[i]
                        if isinstance(lab, kind) and lab.scope == name]
                if not succ:
                    break
                options.append(succ)
            else:
                for combo in product(*options):
                    q = p
                    for i, c2 in zip(members, combo):
                        q = q.replace(i, c2)
                    out.append((kind(name), q))

    # global termination
    ticks = []
    for i in range(len(eps)):
        succ = [c2 for lab, c2 in steps[i] if isinstance(lab, Tick)]
        if not succ:
            break
        ticks.append(succ)
    else:
        for combo in product(*ticks):
            out.append((TICK, System(tuple((r, c2) for (r, _), c2 in zip(eps, combo)))))

    return tuple(_uniq(out))


# -- LTS construction ------------------------------------------------------------

@dataclass
class Lts:
    states: list
    initial: int
    transitions: list            # (source, label, target)
    halt: Optional[int] = None
    _succ: dict = field(default=None, repr=False)

    def successors(self, s):
        if self._succ is None:
            succ = {i: [] for i in range(len(self.states))}
            for src, lab, dst in self.transitions:
                succ[src].append((lab, dst))
            self._succ = succ
        return self._succ[s]

    def predecessors(self):
        pred = {i: [] for i in range(len(self.states))}
        for src, lab, dst in self.transitions:
            pred[dst].append((src, lab))
        return pred

    def tick_states(self):
        return sorted({src for src, lab, _ in self.transitions if isinstance(lab, Tick)})

    def __len__(self):
        return len(self.states)


def build_lts(initial, stepper, max_states=DEFAULT_MAX_STATES):
    """Breadth-first closure of ``stepper`` from ``initial``.

    States are deduplicated by structural equality; every tick target is
    merged into a single halt state which is never expanded.
    """
    if max_states < 1:
        raise ValueError("max_states must be at least 1")
    states = [initial]
    index = {initial: 0}
    transitions = []
    halt = None
    queue = deque([0])
    while queue:
        src = queue.popleft()
        for lab, nxt in stepper(states[src]):
            if isinstance(lab, Tick):
                if halt is None:
                    if len(states) >= max_states:
                        raise StateBoundExceeded(max_states)
                    halt = len(states)
                    states.append(nxt)
                transitions.append((src, lab, halt))
                continue
            dst = index.get(nxt)
            if dst is None:
                if len(states) >= max_states:
                    raise StateBoundExceeded(max_states)
                dst = len(states)
                states.append(nxt)
                index[nxt] = dst
                queue.append(dst)
            transitions.append((src, lab, dst))
    return Lts(states, 0, transitions, halt)


def chor_lts(h, max_states=DEFAULT_MAX_STATES):
    return build_lts(h, chor_steps, max_states)


def contract_lts(c, max_states=DEFAULT_MAX_STATES):
    return build_lts(c, orch_steps, max_states)


def system_lts(p, mode=LOCATED, closed=True, max_states=DEFAULT_MAX_STATES):
    return build_lts(p, lambda s: _sys_steps(s, mode, closed), max_states)
