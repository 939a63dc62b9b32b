"""Scopes and updates: substitution, static checks and a stepping session."""
from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, replace

from .projection import PLAIN, project_role
from .semantics import (
    _scope_names, apply_sys_update, chor_steps, substitute_scope, sys_steps,
)
from .syntax import LOCATED, ParseError, parse_choreography, parse_contract
from .terms import (
    ChorUpd, EndpointUpdate, Scope, SysUpd, System, Update,
    chor_roles, subterms,
)
from .verdict import Verdict, Violation

__all__ = [
    "EXTERNAL", "IllegalChoice", "IllegalUpdate", "Session", "new_session",
    "parse_external_update", "replay", "session_inject", "session_step",
    "substitute_scope", "validate_updatable",
]

EXTERNAL = "external"


class IllegalChoice(IndexError):
    pass


class IllegalUpdate(ValueError):
    pass


# -- static checks -----------------------------------------------------------------


def _scopes(h):
    """Scope constructs of ``h`` outside update bodies."""
    return [s for s in subterms(h, into_updates=False) if isinstance(s, Scope)]


def _types(h):
    return {s.name: s.roles for s in subterms(h, into_updates=True) if isinstance(s, Scope)}


def validate_updatable(h):
    """Unique scope names, update roles within the scope type, known update targets."""
    regions = [h] + [s.body for s in subterms(h, into_updates=True) if isinstance(s, Update)]
    for region in regions:
        counts = Counter(s.name for s in _scopes(region))
        dup = sorted(n for n, k in counts.items() if k > 1)
        if dup:
            scope = next(s for s in _scopes(region) if s.name == dup[0])
            return Verdict.fail(Violation("duplicate-scope", scope,
                                          f"scope {dup[0]} occurs {counts[dup[0]]} times"),
                                f"scope name {dup[0]} is not unique")
    types = _types(h)
    for u in subterms(h, into_updates=True):
        if not isinstance(u, Update):
            continue
        if u.target not in types:
            return Verdict.fail(Violation("unknown-target", u, f"no scope named {u.target}"),
                                f"update targets unknown scope {u.target}")
        extra = sorted(set(chor_roles(u.body)) - types[u.target])
        if extra:
            return Verdict.fail(Violation("role-outside-type", u,
                                          f"roles {', '.join(extra)} not in type of {u.target}"),
                                f"update of {u.target} involves roles outside its type")
    return Verdict.ok(reason="scope names unique and updates respect scope types")


# -- sessions ----------------------------------------------------------------------


@dataclass(frozen=True)
class Session:
    """A simulation run.  ``history`` holds ``(label, term_after)`` pairs."""
    initial: object
    current: object
    history: tuple = ()
    mode: str = LOCATED
    style: str = PLAIN

    @property
    def is_system(self):
        return isinstance(self.current, System)

    def enabled(self):
        if self.is_system:
            return sys_steps(self.current, self.mode, True)
        return chor_steps(self.current)

    def undo(self):
        if not self.history:
            return self
        prev = self.history[-2][1] if len(self.history) > 1 else self.initial
        return replace(self, current=prev, history=self.history[:-1])

    def trace(self):
        return [lab for lab, _ in self.history]


def new_session(term, mode=LOCATED, style=PLAIN):
    return Session(term, term, (), mode, style)


def session_step(s, choice):
    """Advance by an enabled transition index, or inject an external update label."""
    if isinstance(choice, (ChorUpd, SysUpd)):
        return session_inject(s, choice)
    steps = s.enabled()
    if not isinstance(choice, int) or not 0 <= choice < len(steps):
        raise IllegalChoice(f"no enabled transition {choice!r} (0..{len(steps) - 1})")
    lab, nxt = steps[choice]
    return replace(s, current=nxt, history=s.history + ((lab, nxt),))


def _system_scope_members(p, name):
    return [r for r, c in p.endpoints if name in _scope_names(c)]


def session_inject(s, lab):
    if s.is_system:
        if not isinstance(lab, SysUpd):
            raise IllegalUpdate("a system session takes endpoint updates")
        members = _system_scope_members(s.current, lab.scope)
        if not members:
            raise IllegalUpdate(f"scope {lab.scope} is no longer present")
        extra = sorted(set(lab.roles) - set(members))
        if extra:
            raise IllegalUpdate(f"roles {', '.join(extra)} are not in scope {lab.scope}")
        nxt = apply_sys_update(s.current, lab)
    else:
        if not isinstance(lab, ChorUpd):
            raise IllegalUpdate("a choreography session takes choreography updates")
        types = {sc.name: sc.roles for sc in _scopes(s.current)}
        if lab.scope not in types:
            raise IllegalUpdate(f"scope {lab.scope} is no longer present")
        extra = sorted(set(chor_roles(lab.body)) - types[lab.scope])
        if extra:
            raise IllegalUpdate(f"roles {', '.join(extra)} are not in the type of {lab.scope}")
        nxt = substitute_scope(s.current, lab.scope, lab.body)
    return replace(s, current=nxt, history=s.history + ((lab, nxt),))


def replay(s):
    """Re-run the history from ``s.initial``; True iff it reproduces ``s.current``."""
    cur = new_session(s.initial, s.mode, s.style)
    for lab, after in s.history:
        if isinstance(lab, (ChorUpd, SysUpd)):
            targets = [t for l2, t in cur.enabled() if l2 == lab]
            if after in targets:
                cur = replace(cur, current=after, history=cur.history + ((lab, after),))
                continue
            try:
                cur = session_inject(cur, lab)
            except IllegalUpdate:
                return False
        else:
            targets = [t for l2, t in cur.enabled() if l2 == lab]
            if after not in targets:
                return False
            cur = replace(cur, current=after, history=cur.history + ((lab, after),))
        if cur.current != after:
            return False
    return cur.current == s.current


# -- external update text ----------------------------------------------------------

_UPD = re.compile(r"^\s*upd\s+([A-Za-z_][A-Za-z0-9_]*)\s*(@\s*\(.*?\))?\s*\{(.*)\}\s*$", re.S)


def parse_external_update(text, session):
    """``upd X { H }`` for either session kind, or ``upd X @ (r1,..) { C1 ;; .. }`` for systems.

    At system level a choreography body is projected onto the roles whose
    endpoints hold scope X.
    """
    m = _UPD.match(text)
    if not m:
        raise ParseError("expected 'upd X { ... }'", 1, 1, ["upd"])
    name, located, body = m.group(1), m.group(2), m.group(3)
    if not session.is_system:
        if located:
            raise ParseError("role list is only meaningful for systems", 1, 1, ["{"])
        return ChorUpd(name, EXTERNAL, parse_choreography(body))
    if located:
        term = parse_contract(text.strip())
        if not isinstance(term, EndpointUpdate):
            raise ParseError("expected an endpoint update", 1, 1, ["upd"])
        return SysUpd(term.target, term.roles, term.bodies)
    h = parse_choreography(body)
    roles = tuple(sorted(_system_scope_members(session.current, name)))
    return SysUpd(name, roles, tuple(project_role(h, r, session.style) for r in roles))
