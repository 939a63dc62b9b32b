"""Concrete text syntax: tokenizer, recursive-descent parsers, renderers.

Grammar (precedence tightest first: postfix ``*``, ``;``, ``|``, ``+``)::

    chor    := interaction | 1 | 0 | ( chor ) | chor* | chor ; chor
             | chor | chor | chor + chor
             | [active] scope X:{r,...}[ chor ] | upd X @ r { chor }
    contract:= 0 | 1 | tau | a | a!r | a! | ( contract ) | ...operators...
             | [active] scope X[ contract ]
             | upd X @ (r1,...,rn) { C1 ;; ... ;; Cn }
    system  := [ contract ] @ r || ...

Binary operators associate to the left.  ``#`` starts a comment.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .terms import (
    BINARY, ONE, TAU_ACTION, ZERO, ChorUpd, Choice, EndpointScope,
    EndpointUpdate, FreeIn, FreeOut, FreeOutput, Input, InputAt, Interact,
    Interaction, LocOut, LocOutput, One, Par, Scope, ScopeEnd, ScopeStart, Seq,
    Star, SysUpd, System, Tau, TauLabel, Tick, Update, Zero, subterms,
)
from .verdict import Verdict, Violation

KEYWORDS = {"scope", "active", "upd", "tau"}

_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>\#[^\n]*)
  | (?P<num>[01](?![A-Za-z0-9_]))
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>\|\||;;|->|[;|+*()\[\]{}:,@!])
""", re.VERBOSE)


class ParseError(ValueError):
    def __init__(self, message, line, col, expected=()):
        self.line, self.col = line, col
        self.expected = tuple(sorted(set(expected)))
        exp = f" (expected one of: {', '.join(self.expected)})" if expected else ""
        super().__init__(f"{line}:{col}: {message}{exp}")


@dataclass(frozen=True)
class Token:
    kind: str   # 'ident', 'num', 'op', 'eof'
    text: str
    line: int
    col: int


def tokenize(text):
    toks = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}",
                             line, pos - line_start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind not in ("ws", "comment"):
            toks.append(Token(kind, m.group(), line, pos - line_start + 1))
        pos = m.end()
    toks.append(Token("eof", "", line, pos - line_start + 1))
    return toks


class _Parser:
    def __init__(self, text):
        self.toks = tokenize(text)
        self.i = 0

    @property
    def tok(self):
        return self.toks[self.i]

    def peek(self, k=1):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, text):
        t = self.tok
        return t.kind in ("op", "num") and t.text == text or \
            t.kind == "ident" and t.text == text and text in KEYWORDS

    def error(self, expected, msg=None):
        t = self.tok
        what = "end of input" if t.kind == "eof" else repr(t.text)
        raise ParseError(msg or f"unexpected {what}", t.line, t.col, expected)

    def expect(self, text):
        if not self.at(text):
            self.error([text])
        self.i += 1

    def ident(self, what="identifier"):
        t = self.tok
        if t.kind != "ident" or t.text in KEYWORDS:
            self.error([what])
        self.i += 1
        return t.text

    def end(self):
        if self.tok.kind != "eof":
            self.error(["end of input", "+", "|", ";", "*"])

    # generic precedence climbing; ``atom`` is chor- or contract-specific
    def expr(self, atom):
        return self._binary(atom, 0)

    _LEVELS = (("+", Choice), ("|", Par), (";", Seq))

    def _binary(self, atom, level):
        if level == len(self._LEVELS):
            return self._postfix(atom)
        sym, ctor = self._LEVELS[level]
        left = self._binary(atom, level + 1)
        while self.at(sym):
            self.i += 1
            left = ctor(left, self._binary(atom, level + 1))
        return left

    def _postfix(self, atom):
        t = atom()
        while self.at("*"):
            self.i += 1
            t = Star(t)
        return t

    def role_list(self, close):
        roles = [self.ident("role")]
        while self.at(","):
            self.i += 1
            roles.append(self.ident("role"))
        self.expect(close)
        return roles

    # -- choreographies --
    def chor_atom(self):
        t = self.tok
        if self.at("("):
            self.i += 1
            h = self.expr(self.chor_atom)
            self.expect(")")
            return h
        if self.at("1"):
            self.i += 1
            return ONE
        if self.at("0"):
            self.i += 1
            return ZERO
        if self.at("active") or self.at("scope"):
            active = self.at("active")
            if active:
                self.i += 1
            self.expect("scope")
            name = self.ident("scope name")
            self.expect(":")
            self.expect("{")
            roles = self.role_list("}")
            self.expect("[")
            body = self.expr(self.chor_atom)
            self.expect("]")
            return Scope(name, frozenset(roles), body, active)
        if self.at("upd"):
            self.i += 1
            name = self.ident("scope name")
            self.expect("@")
            by = self.ident("role")
            self.expect("{")
            body = self.expr(self.chor_atom)
            self.expect("}")
            return Update(name, by, body)
        if t.kind == "ident" and t.text not in KEYWORDS:
            op = self.ident()
            self.expect(":")
            sender = self.ident("role")
            self.expect("->")
            receiver = self.ident("role")
            return Interaction(op, sender, receiver)
        self.error(["operation", "(", "1", "0", "scope", "active", "upd"])

    # -- contracts --
    def contract_atom(self):
        t = self.tok
        if self.at("("):
            self.i += 1
            c = self.expr(self.contract_atom)
            self.expect(")")
            return c
        if self.at("1"):
            self.i += 1
            return ONE
        if self.at("0"):
            self.i += 1
            return ZERO
        if self.at("tau"):
            self.i += 1
            return TAU_ACTION
        if self.at("active") or self.at("scope"):
            active = self.at("active")
            if active:
                self.i += 1
            self.expect("scope")
            name = self.ident("scope name")
            self.expect("[")
            body = self.expr(self.contract_atom)
            self.expect("]")
            return EndpointScope(name, body, active)
        if self.at("upd"):
            self.i += 1
            name = self.ident("scope name")
            self.expect("@")
            self.expect("(")
            roles = self.role_list(")")
            self.expect("{")
            bodies = [self.expr(self.contract_atom)]
            while self.at(";;"):
                self.i += 1
                bodies.append(self.expr(self.contract_atom))
            self.expect("}")
            if len(bodies) != len(roles):
                raise ParseError(
                    f"update lists {len(roles)} roles but {len(bodies)} bodies",
                    t.line, t.col)
            return EndpointUpdate(name, tuple(roles), tuple(bodies))
        if t.kind == "ident" and t.text not in KEYWORDS:
            op = self.ident()
            if self.at("!"):
                self.i += 1
                nxt = self.tok
                if nxt.kind == "ident" and nxt.text not in KEYWORDS:
                    self.i += 1
                    return LocOutput(op, nxt.text)
                return FreeOutput(op)
            return Input(op)
        self.error(["operation", "(", "1", "0", "tau", "scope", "active", "upd"])

    def system(self):
        eps = []
        while True:
            self.expect("[")
            c = self.expr(self.contract_atom)
            self.expect("]")
            self.expect("@")
            eps.append((self.ident("role"), c))
            if not self.at("||"):
                break
            self.i += 1
        return System(tuple(eps))


def parse_choreography(text):
    p = _Parser(text)
    h = p.expr(p.chor_atom)
    p.end()
    return h


def parse_contract(text):
    p = _Parser(text)
    c = p.expr(p.contract_atom)
    p.end()
    return c


def parse_system(text):
    p = _Parser(text)
    s = p.system()
    p.end()
    return s


# -- rendering ----------------------------------------------------------------

_SYM = {Choice: "+", Seq: ";", Par: "|"}


def render(t):
    """Canonical fully parenthesized text; reparses to an equal term."""
    if isinstance(t, System):
        return " || ".join(f"[{render(c)}]@{r}" for r, c in t.endpoints)
    if isinstance(t, One):
        return "1"
    if isinstance(t, Zero):
        return "0"
    if isinstance(t, BINARY):
        return f"({render(t.left)} {_SYM[type(t)]} {render(t.right)})"
    if isinstance(t, Star):
        inner = render(t.body)
        if not (isinstance(t.body, (BINARY, Star)) and inner.startswith("(")):
            inner = f"({inner})"
        return inner + "*"
    if isinstance(t, Interaction):
        return f"{t.op}: {t.sender}->{t.receiver}"
    if isinstance(t, Scope):
        act = "active " if t.active else ""
        roles = ",".join(sorted(t.roles))
        return f"{act}scope {t.name}:{{{roles}}}[{render(t.body)}]"
    if isinstance(t, Update):
        return f"upd {t.target} @ {t.by} {{ {render(t.body)} }}"
    if isinstance(t, Tau):
        return "tau"
    if isinstance(t, Input):
        return t.op
    if isinstance(t, LocOutput):
        return f"{t.op}!{t.dest}"
    if isinstance(t, FreeOutput):
        return f"{t.op}!"
    if isinstance(t, EndpointScope):
        act = "active " if t.active else ""
        return f"{act}scope {t.name}[{render(t.body)}]"
    if isinstance(t, EndpointUpdate):
        bodies = " ;; ".join(render(b) for b in t.bodies)
        return f"upd {t.target} @ ({','.join(t.roles)}) {{ {bodies} }}"
    raise TypeError(f"cannot render {t!r}")


def render_label(lab):
    if isinstance(lab, Interact):
        return f"{lab.op}: {lab.sender}->{lab.receiver}"
    if isinstance(lab, TauLabel):
        return "tau"
    if isinstance(lab, Tick):
        return "√"
    if isinstance(lab, FreeIn):
        return lab.op
    if isinstance(lab, InputAt):
        return f"{lab.op}@{lab.role}"
    if isinstance(lab, LocOut):
        base = f"{lab.op}!{lab.dest}"
        return base if lab.sender is None else f"{lab.sender}:{base}"
    if isinstance(lab, FreeOut):
        return f"{lab.op}!" if lab.sender is None else f"{lab.sender}:{lab.op}!"
    if isinstance(lab, ChorUpd):
        return f"upd {lab.scope} @ {lab.by} {{ {render(lab.body)} }}"
    if isinstance(lab, SysUpd):
        return render(EndpointUpdate(lab.scope, lab.roles, lab.bodies))
    if isinstance(lab, ScopeStart):
        return f"start {lab.scope}"
    if isinstance(lab, ScopeEnd):
        return f"end {lab.scope}"
    raise TypeError(f"cannot render label {lab!r}")


# -- simplification (display and term comparison only) ----------------------

def simplify(t):
    """Drop 1-units: ``1;C = C;1 = C|1 = 1|C = C`` and ``1* = 1``.

    Every law preserves strong bisimilarity; LTS construction never calls this.
    """
    if isinstance(t, System):
        return System(tuple((r, simplify(c)) for r, c in t.endpoints))
    if isinstance(t, (Seq, Par)):
        left, right = simplify(t.left), simplify(t.right)
        if isinstance(left, One):
            return right
        if isinstance(right, One):
            return left
        return type(t)(left, right)
    if isinstance(t, Choice):
        return Choice(simplify(t.left), simplify(t.right))
    if isinstance(t, Star):
        body = simplify(t.body)
        return ONE if isinstance(body, One) else Star(body)
    if isinstance(t, Scope):
        return Scope(t.name, t.roles, simplify(t.body), t.active)
    if isinstance(t, Update):
        return Update(t.target, t.by, simplify(t.body))
    if isinstance(t, EndpointScope):
        return EndpointScope(t.name, simplify(t.body), t.active)
    if isinstance(t, EndpointUpdate):
        return EndpointUpdate(t.target, t.roles,
                              tuple(simplify(b) for b in t.bodies))
    return t


def canonical(t):
    """Unit-free form with associative/commutative operands flattened and sorted.

    Used only to compare against hand-written terms whose operand order or
    bracketing differs (``(Receipt!Buyer | Confirm!Seller)`` and the like).
    """
    return _canon(simplify(t))


def _flatten(t, ctor, out):
    if isinstance(t, ctor):
        _flatten(t.left, ctor, out)
        _flatten(t.right, ctor, out)
    else:
        out.append(t)
    return out


def _canon(t):
    if isinstance(t, System):
        return System(tuple(sorted(((r, _canon(c)) for r, c in t.endpoints),
                                   key=lambda e: e[0])))
    if isinstance(t, BINARY):
        ops = [_canon(x) for x in _flatten(t, type(t), [])]
        if not isinstance(t, Seq):
            ops.sort(key=render)
        out = ops[0]
        for x in ops[1:]:
            out = type(t)(out, x)
        return out
    if isinstance(t, Star):
        return Star(_canon(t.body))
    if isinstance(t, Scope):
        return Scope(t.name, t.roles, _canon(t.body), t.active)
    if isinstance(t, Update):
        return Update(t.target, t.by, _canon(t.body))
    if isinstance(t, EndpointScope):
        return EndpointScope(t.name, _canon(t.body), t.active)
    if isinstance(t, EndpointUpdate):
        return EndpointUpdate(t.target, t.roles, tuple(_canon(b) for b in t.bodies))
    return t


# -- static validation ---------------------------------------------------------

LOCATED, UNLOCATED = "located", "unlocated"
MODES = (LOCATED, UNLOCATED)


def validate_system(sys, mode=LOCATED):
    """Check distinct roles, no self-directed output, mode-legal outputs."""
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    seen = set()
    for role, _ in sys.endpoints:
        if role in seen:
            return Verdict.fail(Violation("distinct-roles", sys, f"role {role} occurs twice"),
                                f"role {role} is used by more than one endpoint")
        seen.add(role)
    for role, c in sys.endpoints:
        for s in subterms(c):
            if isinstance(s, LocOutput) and s.dest == role:
                return Verdict.fail(
                    Violation("self-output", s, f"endpoint {role}"),
                    f"endpoint {role} contains output {render(s)} directed to itself")
            if isinstance(s, FreeOutput) and mode == LOCATED:
                return Verdict.fail(
                    Violation("unlocated-output", s, f"endpoint {role}"),
                    f"endpoint {role} contains unlocated output {render(s)} in located mode")
    return Verdict.ok(reason="system is well formed")
