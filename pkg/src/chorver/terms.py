"""Abstract syntax for choreographies, contracts, systems, and transition labels.

Terms are frozen dataclasses so that structural equality and hashing come for
free; LTS construction relies on both for state deduplication.  The operator
nodes (``Choice``, ``Seq``, ``Par``, ``Star``, ``One``, ``Zero``) are shared
between the choreography and contract calculi; the leaves tell them apart.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple, Union


# -- shared operators ---------------------------------------------------------

@dataclass(frozen=True)
class One:
    pass


@dataclass(frozen=True)
class Zero:
    pass


ONE = One()
ZERO = Zero()


@dataclass(frozen=True)
class Choice:
    left: object
    right: object


@dataclass(frozen=True)
class Seq:
    left: object
    right: object


@dataclass(frozen=True)
class Par:
    left: object
    right: object


@dataclass(frozen=True)
class Star:
    body: object


BINARY = (Choice, Seq, Par)


# -- choreography leaves ------------------------------------------------------

@dataclass(frozen=True)
class Interaction:
    """``op`` invoked by ``sender`` on ``receiver``."""
    op: str
    sender: str
    receiver: str


@dataclass(frozen=True)
class Scope:
    name: str
    roles: frozenset
    body: object
    active: bool = False


@dataclass(frozen=True)
class Update:
    """Internal update of scope ``target`` offered by role ``by``."""
    target: str
    by: str
    body: object


# -- contract leaves ----------------------------------------------------------

@dataclass(frozen=True)
class Tau:
    pass


TAU_ACTION = Tau()


@dataclass(frozen=True)
class Input:
    op: str


@dataclass(frozen=True)
class LocOutput:
    op: str
    dest: str


@dataclass(frozen=True)
class FreeOutput:
    """Name-based (CCS style) output; only legal in unlocated mode."""
    op: str


@dataclass(frozen=True)
class EndpointScope:
    name: str
    body: object
    active: bool = False


@dataclass(frozen=True)
class EndpointUpdate:
    target: str
    roles: Tuple[str, ...]
    bodies: tuple

    def __post_init__(self):
        if len(self.roles) != len(self.bodies):
            raise ValueError(
                f"update of {self.target}: {len(self.roles)} roles but "
                f"{len(self.bodies)} bodies")


ChorTerm = Union[One, Zero, Choice, Seq, Par, Star, Interaction, Scope, Update]
ContractTerm = Union[One, Zero, Choice, Seq, Par, Star, Tau, Input, LocOutput,
                     FreeOutput, EndpointScope, EndpointUpdate]


@dataclass(frozen=True)
class System:
    """Parallel composition ``[C1]@r1 || ... || [Cn]@rn``, kept flat."""
    endpoints: Tuple[Tuple[str, object], ...]

    @property
    def roles(self):
        return tuple(r for r, _ in self.endpoints)

    def contract(self, role):
        for r, c in self.endpoints:
            if r == role:
                return c
        raise KeyError(role)

    def replace(self, index, contract):
        eps = list(self.endpoints)
        eps[index] = (eps[index][0], contract)
        return System(tuple(eps))


def system(*pairs):
    return System(tuple(pairs))


# -- labels -------------------------------------------------------------------

@dataclass(frozen=True)
class Interact:
    op: str
    sender: str
    receiver: str


@dataclass(frozen=True)
class InputAt:
    op: str
    role: str


@dataclass(frozen=True)
class LocOut:
    """Located output; ``sender`` is None at contract level."""
    op: str
    dest: str
    sender: object = None


@dataclass(frozen=True)
class FreeIn:
    op: str


@dataclass(frozen=True)
class FreeOut:
    op: str
    sender: object = None


@dataclass(frozen=True)
class TauLabel:
    pass


@dataclass(frozen=True)
class Tick:
    pass


TAU = TauLabel()
TICK = Tick()


@dataclass(frozen=True)
class ChorUpd:
    scope: str
    by: str
    body: object


@dataclass(frozen=True)
class SysUpd:
    scope: str
    roles: Tuple[str, ...]
    bodies: tuple


@dataclass(frozen=True)
class ScopeStart:
    scope: str


@dataclass(frozen=True)
class ScopeEnd:
    scope: str


OUTPUT_LABELS = (LocOut, FreeOut)
# labels that are invisible for completed-trace comparison
SILENT_LABELS = (TauLabel, ChorUpd, SysUpd, ScopeStart, ScopeEnd)


# -- generic traversal helpers ------------------------------------------------

def children(t):
    if isinstance(t, BINARY):
        return (t.left, t.right)
    if isinstance(t, Star):
        return (t.body,)
    if isinstance(t, (Scope, EndpointScope)):
        return (t.body,)
    if isinstance(t, Update):
        return (t.body,)
    if isinstance(t, EndpointUpdate):
        return tuple(t.bodies)
    return ()


def subterms(t, into_updates=True):
    """Pre-order iteration over all subterms of ``t``."""
    stack = [t]
    while stack:
        cur = stack.pop()
        yield cur
        if not into_updates and isinstance(cur, (Update, EndpointUpdate)):
            continue
        stack.extend(reversed(children(cur)))


def size(t):
    return sum(1 for _ in subterms(t))


def depth(t):
    kids = children(t)
    return 1 + max((depth(k) for k in kids), default=0)


def interactions(h, into_updates=False):
    return [s for s in subterms(h, into_updates) if isinstance(s, Interaction)]


def chor_roles(h):
    """Roles occurring in interactions, scope types, and update annotations.

    Returned in order of first occurrence, which keeps projected systems in the
    order a reader sees the roles in the source text.
    """
    seen = {}
    for s in subterms(h, into_updates=False):
        if isinstance(s, Interaction):
            seen.setdefault(s.sender, None)
            seen.setdefault(s.receiver, None)
        elif isinstance(s, Scope):
            for r in sorted(s.roles):
                seen.setdefault(r, None)
        elif isinstance(s, Update):
            seen.setdefault(s.by, None)
    return list(seen)


def seq_all(*terms):
    """Left-nested sequence, matching how the parser associates ``;``."""
    out = terms[0]
    for t in terms[1:]:
        out = Seq(out, t)
    return out
