"""``chorver`` command line.

Exit status: 0 when the property holds (or no counterexample was found within
the bound), 1 when it fails, 2 on parse, validation or bound errors.  Verdicts
go to stdout only; diagnostics go to stderr.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path as FsPath
from typing import Optional

from . import __version__
from .analysis import (
    NAME_AND_DEST, NAME_ONLY, check_compliance, check_connected, check_implements,
    check_output_persistent, check_well_formed,
)
from .projection import STYLES, normalize_style, project_role, project_system
from .refinement import (
    Knowledge, NameSet, NoCounterexampleUpTo, Refuted, RefinementQuery,
    check_consonance_bounded, check_controllable_bounded, check_subcontract_bounded,
    normal_form,
)
from .semantics import DEFAULT_MAX_STATES, StateBoundExceeded, chor_lts, contract_lts, system_lts
from .syntax import (
    LOCATED, MODES, ParseError, parse_choreography, parse_contract, parse_system,
    render, render_label, simplify,
)
from .terms import System
from .updates import (
    IllegalChoice, IllegalUpdate, new_session, parse_external_update, session_step,
)
from .verdict import verdict_json, witness_json

log = logging.getLogger("chorver")

HOLDS, FAILS, ERROR = 0, 1, 2


@dataclass
class RunConfig:
    command: str
    inputs: list = field(default_factory=list)
    mode: str = LOCATED
    style: str = "plain"
    depth: Optional[int] = None
    max_states: int = DEFAULT_MAX_STATES
    fmt: Optional[str] = None


class UsageError(Exception):
    pass


# -- input helpers ---------------------------------------------------------------


def read_arg(text):
    """A file path if one exists, otherwise the argument itself as source text."""
    p = FsPath(text)
    try:
        if p.is_file():
            return p.read_text()
    except OSError:
        pass
    return text


def guess_kind(arg, src):
    suffix = FsPath(arg).suffix
    if suffix == ".chor":
        return "chor"
    if suffix == ".sys":
        return "sys"
    if suffix in (".ctr", ".c"):
        return "contract"
    body = "\n".join(l.split("#", 1)[0] for l in src.splitlines()).strip()
    if body.startswith("["):
        return "sys"
    return "chor" if "->" in body else "contract"


def load(arg, kind=None):
    src = read_arg(arg)
    kind = kind or guess_kind(arg, src)
    parser = {"chor": parse_choreography, "sys": parse_system,
              "contract": parse_contract}[kind]
    return kind, parser(src)


def parse_pair(text):
    """``key: value`` lines describing one refinement query."""
    out = {}
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition(":")
        if not sep:
            raise UsageError(f"pair file line without ':': {line!r}")
        out[key.strip()] = value.strip()
    missing = {"candidate", "reference", "role"} - set(out)
    if missing:
        raise UsageError(f"pair file lacks {', '.join(sorted(missing))}")
    return out


# -- output helpers ----------------------------------------------------------------


def emit(obj, out):
    out.write(json.dumps(obj, ensure_ascii=False, indent=2) + "\n")


def emit_verdict(v, fmt, out):
    if fmt == "text":
        out.write(("holds" if v.holds else "fails") + (f": {v.reason}" if v.reason else "") + "\n")
        if v.witness is not None:
            out.write("witness: " + json.dumps(witness_json(v.witness), ensure_ascii=False) + "\n")
    else:
        emit(verdict_json(v), out)
    return HOLDS if v.holds else FAILS


def refinement_json(v):
    if isinstance(v, Refuted):
        return {"holds": False, "verdict": "refuted", "test": render(v.test)}
    return {"holds": True, "verdict": "no-counterexample", "depth": v.depth,
            "tests_tried": v.tests_tried, "skipped": v.skipped, "note": v.note}


def emit_refinement(v, fmt, out):
    if fmt == "text":
        if isinstance(v, Refuted):
            out.write(f"refuted by test: {render(v.test)}\n")
        else:
            out.write(f"no counterexample up to depth {v.depth} "
                      f"({v.tests_tried} tests, {v.skipped} skipped)"
                      + (f": {v.note}" if v.note else "") + "\n")
    else:
        emit(refinement_json(v), out)
    return FAILS if isinstance(v, Refuted) else HOLDS


def lts_json(lts):
    return {
        "states": [render(s) for s in lts.states],
        "initial": lts.initial,
        "halt": lts.halt,
        "transitions": [{"from": a, "label": render_label(l), "to": b}
                        for a, l, b in lts.transitions],
    }


def lts_dot(lts):
    def q(s):
        return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'

    lines = ["digraph lts {", "  rankdir=LR;", "  __start [shape=point];"]
    for i, s in enumerate(lts.states):
        shape = "doublecircle" if i == lts.halt else "circle"
        lines.append(f"  s{i} [shape={shape}, tooltip={q(render(s))}, label=\"{i}\"];")
    lines.append(f"  __start -> s{lts.initial};")
    for a, l, b in lts.transitions:
        lines.append(f"  s{a} -> s{b} [label={q(render_label(l))}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


# -- commands ----------------------------------------------------------------------


def cmd_compliance(a, out):
    _, p = load(a.system, "sys")
    return emit_verdict(check_compliance(p, a.mode, a.max_states), a.format, out)


def cmd_wf(a, out):
    _, h = load(a.chor, "chor")
    return emit_verdict(check_well_formed(h, a.style, a.max_states), a.format, out)


def cmd_connected(a, out):
    _, h = load(a.chor, "chor")
    return emit_verdict(check_connected(h), a.format, out)


def cmd_implements(a, out):
    _, p = load(a.system, "sys")
    _, h = load(a.chor, "chor")
    return emit_verdict(check_implements(p, h, a.mode, a.max_states), a.format, out)


def cmd_outpersist(a, out):
    _, c = load(a.expr, "contract")
    return emit_verdict(check_output_persistent(c, a.op_exempt, a.max_states), a.format, out)


def cmd_lts(a, out):
    kind, t = load(a.file, a.kind)
    if kind == "chor":
        lts = chor_lts(t, a.max_states)
    elif kind == "sys":
        lts = system_lts(t, a.mode, not a.open, a.max_states)
    else:
        lts = contract_lts(t, a.max_states)
    if a.format == "dot":
        out.write(lts_dot(lts))
    elif a.format == "text":
        for s, l, d in lts.transitions:
            out.write(f"{s} --{render_label(l)}--> {d}\n")
    else:
        emit(lts_json(lts), out)
    return HOLDS


def cmd_project(a, out):
    _, h = load(a.chor, "chor")
    if a.all == bool(a.role):
        raise UsageError("give exactly one of --role and --all")
    if a.all:
        p = project_system(h, a.style)
        if a.simplify:
            p = simplify(p)
        out.write(" ||\n".join(f"[{render(c)}]@{r}" for r, c in p.endpoints) + "\n")
    else:
        c = project_role(h, a.role, a.style)
        out.write(render(simplify(c) if a.simplify else c) + "\n")
    return HOLDS


def _knowledge(a, pair=None):
    pair = pair or {}
    ins = a.in_know if a.in_know is not None else pair.get("test_inputs")
    outs = a.out_know if a.out_know is not None else pair.get("test_outputs")
    if ins is None and outs is None:
        return None
    return Knowledge(NameSet.parse(ins) if ins is not None else NameSet(),
                     NameSet.parse(outs) if outs is not None else NameSet())


def cmd_refine(a, out):
    pair = {}
    if a.pair:
        pair = parse_pair(read_arg(a.pair))
    cand_src = a.candidate or pair.get("candidate")
    ref_src = a.reference or pair.get("reference")
    role = a.role or pair.get("role")
    if not (cand_src and ref_src and role):
        raise UsageError("refine needs a candidate, a reference and --role (or --pair)")
    mode = a.mode if a.mode_given else pair.get("mode", a.mode)
    depth = a.depth or int(pair.get("depth", 3))
    _, cand = load(cand_src, "contract")
    _, ref = load(ref_src, "contract")
    q = RefinementQuery(cand, ref, role, _knowledge(a, pair), depth, a.test_roles, mode)
    return emit_refinement(check_subcontract_bounded(q), a.format, out)


def cmd_controllable(a, out):
    _, c = load(a.expr, "contract")
    v = check_controllable_bounded(c, a.role, a.depth or 3, a.mode, a.test_roles)
    return emit_verdict(v, a.format, out)


def cmd_nf(a, out):
    _, c = load(a.expr, "contract")
    out.write(str(normal_form(c, a.max_states)) + "\n")
    return HOLDS


def cmd_consonance(a, out):
    _, c = load(a.contract, "contract")
    _, h = load(a.chor, "chor")
    v = check_consonance_bounded(c, a.role, h, a.depth or 2, a.test_roles)
    return emit_refinement(v, a.format, out)


def _show(session, out):
    out.write(f"current: {render(session.current)}\n")
    for i, (lab, _) in enumerate(session.enabled()):
        out.write(f"  {i}: {render_label(lab)}\n")


def run_command(session, line, out):
    """Apply one simulator command; returns the new session or None to quit."""
    line = line.split("#", 1)[0].strip()
    if not line:
        return session
    if line in ("quit", "exit"):
        return None
    if line == "undo":
        return session.undo()
    if line == "trace":
        out.write(", ".join(render_label(l) for l in session.trace()) + "\n")
        return session
    if line.startswith("upd"):
        return session_step(session, parse_external_update(line, session))
    try:
        index = int(line)
    except ValueError:
        raise IllegalChoice(f"unknown command {line!r}") from None
    return session_step(session, index)


def cmd_simulate(a, out):
    kind, t = load(a.file)
    if kind == "contract":
        raise UsageError("simulate takes a choreography or a system")
    session = new_session(t, a.mode, normalize_style(a.style))
    if a.script:
        for line in read_arg(a.script).splitlines():
            session = run_command(session, line, out)
            if session is None:
                break
        if session is not None:
            out.write(render(session.current) + "\n")
        return HOLDS
    interactive = sys.stdin.isatty()
    while session is not None:
        _show(session, out)
        if interactive:
            out.write("> ")
            out.flush()
        line = sys.stdin.readline()
        if not line:
            break
        try:
            session = run_command(session, line, out)
        except (IllegalChoice, IllegalUpdate, ParseError) as e:
            out.write(f"error: {e}\n")
    return HOLDS


# -- parser ------------------------------------------------------------------------


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--max-states", type=int, default=DEFAULT_MAX_STATES)
    common.add_argument("--format", choices=("text", "json", "dot"), default=None)
    common.add_argument("--mode", choices=MODES, default=None)
    common.add_argument("--style", default="plain",
                        help="projection style: " + ", ".join(STYLES) + " (alias op)")
    common.add_argument("--op-exempt", choices=(NAME_AND_DEST, NAME_ONLY), default=NAME_AND_DEST)
    common.add_argument("-v", "--verbose", action="store_true")

    ap = argparse.ArgumentParser(prog="chorver", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"chorver {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(func=func)
        return p

    add("compliance", cmd_compliance, "fair-termination check of a system").add_argument("system")
    add("wf", cmd_wf, "well-formedness of a choreography").add_argument("chor")
    add("connected", cmd_connected, "syntactic connectedness conditions").add_argument("chor")
    p = add("implements", cmd_implements, "system implements choreography")
    p.add_argument("system")
    p.add_argument("chor")
    add("outpersist", cmd_outpersist, "output persistence of a contract").add_argument("expr")
    p = add("lts", cmd_lts, "export the transition system")
    p.add_argument("file")
    p.add_argument("--kind", choices=("chor", "sys", "contract"))
    p.add_argument("--open", action="store_true", help="keep unmatched input/output labels")
    p = add("project", cmd_project, "project a choreography")
    p.add_argument("chor")
    p.add_argument("--role")
    p.add_argument("--all", action="store_true")
    p.add_argument("--simplify", action="store_true")

    def refinement_opts(p):
        p.add_argument("--depth", type=int)
        p.add_argument("--test-roles", type=int)

    p = add("refine", cmd_refine, "bounded subcontract check")
    p.add_argument("candidate", nargs="?")
    p.add_argument("reference", nargs="?")
    p.add_argument("--role")
    p.add_argument("--pair", help="file with candidate/reference/role lines")
    p.add_argument("--in-know", help="names tests may input; '~a,b' for a complement")
    p.add_argument("--out-know", help="names tests may output; '~a,b' for a complement")
    refinement_opts(p)
    p = add("controllable", cmd_controllable, "search for a compliant test")
    p.add_argument("expr")
    p.add_argument("--role", required=True)
    refinement_opts(p)
    add("nf", cmd_nf, "equation-system normal form").add_argument("expr")
    p = add("consonance", cmd_consonance, "bounded consonance with a choreography role")
    p.add_argument("contract")
    p.add_argument("chor")
    p.add_argument("--role", required=True)
    refinement_opts(p)
    p = add("simulate", cmd_simulate, "step through a choreography or system")
    p.add_argument("file")
    p.add_argument("--script")
    return ap


_DEFAULT_FORMAT = {"lts": "json", "project": "text", "nf": "text", "simulate": "text"}


def main(argv=None, out=None):
    out = out or sys.stdout
    ap = build_parser()
    a = ap.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if a.verbose else logging.WARNING,
                        format="%(name)s: %(message)s", stream=sys.stderr)
    a.mode_given = a.mode is not None
    a.mode = a.mode or LOCATED
    a.format = a.format or _DEFAULT_FORMAT.get(a.command, "json")
    try:
        a.style = normalize_style(a.style)
        if a.format == "dot" and a.command != "lts":
            raise UsageError("dot output is only available for lts")
        return a.func(a, out)
    except ParseError as e:
        print(f"chorver: parse error: {e}", file=sys.stderr)
    except StateBoundExceeded as e:
        print(f"chorver: {e}", file=sys.stderr)
    except (UsageError, ValueError, OSError, IllegalChoice, IllegalUpdate) as e:
        print(f"chorver: {e}", file=sys.stderr)
    return ERROR


if __name__ == "__main__":
    sys.exit(main())
