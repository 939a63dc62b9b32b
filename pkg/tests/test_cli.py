import json
from io import StringIO

import pytest

from chorver.cli import main
from chorver.syntax import canonical, parse_choreography as H, parse_system as S


def run(*argv):
    out = StringIO()
    return main(list(argv), out=out), out.getvalue()


def test_wf_disconnected_json():
    rc, text = run("wf", "a: r->s ; b: t->u")
    assert rc == 1
    assert json.loads(text)["witness"]["word"] == ["b: t->u", "a: r->s"]


def test_wf_bsb_holds():
    assert run("wf", "corpus/bsb.chor")[0] == 0


def test_compliance_deadlock_path():
    rc, text = run("compliance", "corpus/deadlock.sys")
    doc = json.loads(text)
    assert rc == 1 and [s["label"] for s in doc["witness"]["steps"]] == ["c: l1->l2"]


def test_compliance_unlocated_capture():
    assert run("compliance", "--mode", "unlocated", "corpus/capture.sys")[0] == 1
    assert run("compliance", "--mode", "unlocated", "corpus/capture-ok.sys")[0] == 0


def test_connected_text():
    rc, text = run("connected", "--format", "text", "corpus/interference.chor")
    assert rc == 1 and "parallel" in text


def test_project_all():
    rc, text = run("project", "--all", "corpus/bsb.chor")
    assert rc == 0
    assert canonical(S(text)) == canonical(S(open("corpus/bsb.sys").read()))


def test_nf_outputs():
    assert run("nf", "a;b")[1].splitlines() == [
        "X1 = a;X2", "X2 = b;X3", "X3 = √;X4", "X4 = 0"]
    assert run("nf", "0")[1].strip() == "X1 = 0"


def test_lts_dot():
    rc, text = run("lts", "--format", "dot", "a: r->s")
    assert rc == 0 and text.startswith("digraph lts")


def test_refine_pairs():
    rc, text = run("refine", "--pair", "corpus/pairs/a-vs-ab.pair", "--depth", "2")
    assert rc == 1 and json.loads(text)["test"] == "[(tau ; b!l)]@t1"
    assert run("refine", "tau;a!t", "tau;a!t", "--role", "l", "--depth", "1")[0] == 0


def test_controllable():
    assert run("controllable", "a", "--role", "l")[0] == 0
    rc, text = run("controllable", "c;d;0", "--role", "l", "--depth", "4")
    assert rc == 1 and "no compliant test up to depth 4" in json.loads(text)["reason"]


def test_simulate_script():
    rc, text = run("simulate", "corpus/adaptable-bsb.chor", "--script", "corpus/adaptable-bsb.script")
    assert rc == 0
    final = text.strip().splitlines()[-1]
    assert canonical(H(final)) == canonical(H("""
        (Offer: Seller->Buyer | PayDescr: Seller->Bank) ;
        scope X:{Buyer,Bank}[VISAcode: Buyer->Bank ; VISAok: Bank->Buyer] ;
        (Confirm: Bank->Seller | Receipt: Bank->Buyer)"""))


@pytest.mark.parametrize("argv", [("nf", "a +"), ("wf", "a: r->"), ("lts", "--format", "dot", "no/such/file.chor")])
def test_errors_exit_2(argv, capsys):
    assert run(*argv)[0] == 2
    assert capsys.readouterr().err.startswith("chorver:")


def test_dot_only_for_lts():
    assert run("wf", "--format", "dot", "a: r->s")[0] == 2
