"""Projection of choreographies onto roles."""
from __future__ import annotations

from .terms import (
    ONE, TAU_ACTION, Choice, EndpointScope, EndpointUpdate, Input, Interaction,
    LocOutput, One, Par, Scope, Seq, Star, System, Update, Zero, chor_roles,
    subterms,
)

PLAIN, OUTPUT_PERSISTENT = "plain", "output_persistent"
STYLES = (PLAIN, OUTPUT_PERSISTENT)
_STYLE_ALIASES = {"plain": PLAIN, "op": OUTPUT_PERSISTENT,
                  "output_persistent": OUTPUT_PERSISTENT,
                  "output-persistent": OUTPUT_PERSISTENT}


class UnknownScopeType(ValueError):
    pass


def normalize_style(style):
    try:
        return _STYLE_ALIASES[style]
    except KeyError:
        raise ValueError(f"unknown projection style {style!r}") from None


def scope_types(h):
    """Map each scope name in ``h`` (update bodies included) to its role set."""
    types = {}
    for s in subterms(h, into_updates=True):
        if isinstance(s, Scope):
            types.setdefault(s.name, s.roles)
    return types


def project_role(h, role, style=PLAIN, types=None):
    style = normalize_style(style)
    if types is None:
        types = scope_types(h)
    return _project(h, role, style, types)


def _project(h, r, style, types):
    if isinstance(h, Interaction):
        if r == h.sender:
            out = LocOutput(h.op, h.receiver)
            return Seq(TAU_ACTION, out) if style == OUTPUT_PERSISTENT else out
        if r == h.receiver:
            return Input(h.op)
        return ONE
    if isinstance(h, (One, Zero)):
        return h
    if isinstance(h, (Choice, Seq, Par)):
        return type(h)(_project(h.left, r, style, types),
                       _project(h.right, r, style, types))
    if isinstance(h, Star):
        return Star(_project(h.body, r, style, types))
    if isinstance(h, Scope):
        if r in h.roles:
            return EndpointScope(h.name, _project(h.body, r, style, types), h.active)
        return ONE
    if isinstance(h, Update):
        if r != h.by:
            return ONE
        if h.target not in types:
            raise UnknownScopeType(f"update targets unknown scope {h.target!r}")
        inner = dict(types)
        for name, roles in scope_types(h.body).items():
            inner.setdefault(name, roles)
        roles = tuple(sorted(types[h.target]))
        return EndpointUpdate(h.target, roles,
                              tuple(_project(h.body, ri, style, inner) for ri in roles))
    raise TypeError(f"not a choreography term: {h!r}")


def project_system(h, style=PLAIN):
    """``[proj(h, r1)]@r1 || ... `` over the roles of ``h`` in order of appearance."""
    types = scope_types(h)
    return System(tuple((r, project_role(h, r, style, types)) for r in chor_roles(h)))


def erase_tau_guards(c):
    """Inverse of the output-persistent output clause: ``tau;a!s`` back to ``a!s``."""
    if isinstance(c, Seq):
        if c.left == TAU_ACTION and isinstance(c.right, LocOutput):
            return c.right
        return Seq(erase_tau_guards(c.left), erase_tau_guards(c.right))
    if isinstance(c, (Choice, Par)):
        return type(c)(erase_tau_guards(c.left), erase_tau_guards(c.right))
    if isinstance(c, Star):
        return Star(erase_tau_guards(c.body))
    if isinstance(c, EndpointScope):
        return EndpointScope(c.name, erase_tau_guards(c.body), c.active)
    if isinstance(c, EndpointUpdate):
        return EndpointUpdate(c.target, c.roles,
                              tuple(erase_tau_guards(b) for b in c.bodies))
    return c
