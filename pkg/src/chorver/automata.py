"""Finite automata over interaction labels: completed traces and inclusion.

The left automaton stays nondeterministic; only the right one is determinized,
lazily, while the product is explored.  Exploration is a 0-1 BFS (silent
moves cost nothing, letters cost one) so the reported difference word is a
shortest one.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .terms import Interact, Tick


@dataclass
class Nfa:
    n: int
    initial: int
    eps: dict          # state -> [state]
    delta: dict        # state -> [(letter, state)]
    accepting: frozenset

    def closure(self, states):
        seen = set(states)
        stack = list(states)
        while stack:
            s = stack.pop()
            for t in self.eps.get(s, ()):
                if t not in seen:
                    seen.add(t)
                    stack.append(t)
        return frozenset(seen)

    def move(self, states, letter):
        return self.closure({t for s in states for a, t in self.delta.get(s, ())
                             if a == letter})

    def accepts(self, word):
        cur = self.closure({self.initial})
        for a in word:
            cur = self.move(cur, a)
            if not cur:
                return False
        return bool(cur & self.accepting)

    def alphabet(self):
        return {a for edges in self.delta.values() for a, _ in edges}

    def is_empty(self):
        return not self._reaches_accepting()

    def _reaches_accepting(self):
        seen = {self.initial}
        stack = [self.initial]
        while stack:
            s = stack.pop()
            if s in self.accepting:
                return True
            for t in list(self.eps.get(s, ())) + [t for _, t in self.delta.get(s, ())]:
                if t not in seen:
                    seen.add(t)
                    stack.append(t)
        return False


def completed_traces(lts):
    """Automaton accepting the words ``w`` with ``term ==w tick==>``.

    Interaction labels are letters; every other label except tick is silent.
    A state accepts when it has an outgoing tick.
    """
    eps, delta = {}, {}
    accepting = set()
    for src, lab, dst in lts.transitions:
        if isinstance(lab, Tick):
            accepting.add(src)
        elif isinstance(lab, Interact):
            delta.setdefault(src, []).append((lab, dst))
        else:
            eps.setdefault(src, []).append(dst)
    return Nfa(len(lts.states), lts.initial, eps, delta, frozenset(accepting))


def inclusion_counterexample(left, right):
    """Shortest word accepted by ``left`` and rejected by ``right``, or None."""
    start = (left.initial, right.closure({right.initial}))
    dist = {start: 0}
    parent = {start: None}
    dq = deque([start])
    done = set()
    while dq:
        node = dq.popleft()
        if node in done:
            continue
        done.add(node)
        p, d = node
        if p in left.accepting and not (d & right.accepting):
            word = []
            while parent[node] is not None:
                node, letter = parent[node]
                if letter is not None:
                    word.append(letter)
            return tuple(reversed(word))
        k = dist[node]
        for q in left.eps.get(p, ()):
            nxt = (q, d)
            if dist.get(nxt, k + 1) > k:
                dist[nxt] = k
                parent[nxt] = (node, None)
                dq.appendleft(nxt)
        for a, q in left.delta.get(p, ()):
            nxt = (q, right.move(d, a) if d else frozenset())
            if dist.get(nxt, k + 2) > k + 1:
                dist[nxt] = k + 1
                parent[nxt] = (node, a)
                dq.append(nxt)
    return None
