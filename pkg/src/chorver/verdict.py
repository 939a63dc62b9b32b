"""Verdicts and the witnesses that back them."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional


@dataclass(frozen=True)
class Path:
    """A run ``steps[0][0] --steps[0][1]--> ... --> final``."""
    steps: tuple
    final: object

    @property
    def start(self):
        return self.steps[0][0] if self.steps else self.final

    @property
    def labels(self):
        return [lab for _, lab in self.steps]

    def states(self):
        return [s for s, _ in self.steps] + [self.final]


@dataclass(frozen=True)
class Word:
    """A completed interaction trace (tick omitted)."""
    labels: tuple


@dataclass(frozen=True)
class Violation:
    condition: str
    subterm: object
    detail: str = ""


@dataclass
class Verdict:
    holds: bool
    witness: Any = None
    reason: str = ""
    parts: dict = field(default_factory=dict)

    def __bool__(self):
        return self.holds

    @classmethod
    def ok(cls, witness=None, reason=""):
        return cls(True, witness, reason)

    @classmethod
    def fail(cls, witness, reason=""):
        return cls(False, witness, reason)


def witness_json(w: Optional[object]):
    """JSON-ready rendering of any witness object."""
    from .syntax import render, render_label

    if w is None:
        return None
    if isinstance(w, Path):
        return {
            "kind": "path",
            "steps": [{"state": render(s), "label": render_label(lab)}
                      for s, lab in w.steps],
            "final": render(w.final),
        }
    if isinstance(w, Word):
        return {"kind": "word", "word": [render_label(lab) for lab in w.labels]}
    if isinstance(w, Violation):
        return {"kind": "violation", "condition": w.condition,
                "subterm": render(w.subterm), "detail": w.detail}
    if isinstance(w, Verdict):
        return verdict_json(w)
    if isinstance(w, dict):
        return {k: witness_json(v) for k, v in w.items()}
    if isinstance(w, (list, tuple)):
        return [witness_json(v) for v in w]
    try:
        return render(w)
    except TypeError:
        return str(w)


def verdict_json(v: Verdict):
    out = {"holds": v.holds, "reason": v.reason,
           "witness": witness_json(v.witness)}
    if v.parts:
        out["parts"] = {k: verdict_json(p) for k, p in v.parts.items()}
    return out
