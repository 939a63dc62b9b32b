import random
from itertools import product

from hypothesis import given, settings

from chorver import automata
from chorver.analysis import (
    NAME_ONLY, alphabets, check_compliance, check_connected, check_implements,
    check_output_persistent, check_well_formed, completed_traces,
    is_compliant, restrict_inputs,
    trans_final, trans_initial, unique_point_of_choice,
)
from chorver.projection import project_role, project_system
from chorver.randgen import random_chor, random_system
from chorver.semantics import StateBoundExceeded, chor_lts, contract_lts, sys_steps, system_lts
from chorver.syntax import (
    parse_choreography as H, parse_contract as C, parse_system as S,
)
from chorver.terms import ONE, ZERO, Input, Interact, Seq, Tick, Zero
from chorver.verdict import Path, Word

from strategies import contracts

BSB = open("corpus/bsb.chor").read()
BSB_SYS = open("corpus/bsb.sys").read()


def replay_path(p, path, mode="located"):
    """Re-derive every step of a witness path through the steppers."""
    cur = path.start
    for state, lab in path.steps:
        assert state == cur
        nxt = [q for l, q in sys_steps(cur, mode) if l == lab]
        assert nxt, f"label {lab} not enabled"
        cur = path.final if path.final in nxt else nxt[0]
    return cur


# -- compliance ---------------------------------------------------------------------


def test_bsb_implementation_compliant():
    assert check_compliance(S(BSB_SYS))


def test_deadlock_after_c():
    p = S("[a + (c;0)]@l2 || [a!l2 + (c!l2;0)]@l1")
    v = check_compliance(p)
    assert not v
    assert isinstance(v.witness, Path)
    assert v.witness.labels == [Interact("c", "l1", "l2")]
    final = replay_path(p, v.witness)
    lts = system_lts(final)
    assert not lts.tick_states()


def test_zero_endpoint():
    assert not check_compliance(S("[0]@r"))


def test_invalid_system_is_reported_not_raised():
    v = check_compliance(S("[a!r]@r"))
    assert not v and v.witness.condition == "self-output"


def test_is_compliant_agrees():
    for text in (BSB_SYS, "[0]@r", "[a + (c;0)]@l2 || [a!l2 + (c!l2;0)]@l1"):
        assert is_compliant(S(text)) == bool(check_compliance(S(text)))


# -- traces and implementation ---------------------------------------------------------


def test_completed_traces_interaction():
    nfa = completed_traces(chor_lts(H("a: r->s")))
    assert nfa.accepts([Interact("a", "r", "s")])
    assert not nfa.accepts([])


def test_completed_traces_zero():
    assert completed_traces(chor_lts(ZERO)).is_empty()


def test_disconnected_traces():
    p = project_system(H("a: r->s ; b: t->u"))
    nfa = completed_traces(system_lts(p))
    a, b = Interact("a", "r", "s"), Interact("b", "t", "u")
    assert nfa.accepts([a, b]) and nfa.accepts([b, a])


def test_implements_bsb():
    assert check_implements(S(BSB_SYS), H(BSB))


def test_implements_disconnected_witness():
    h = H("a: r->s ; b: t->u")
    v = check_implements(project_system(h), h)
    assert not v
    assert v.witness == Word((Interact("b", "t", "u"), Interact("a", "r", "s")))


def test_implements_empty_word():
    v = check_implements(S("[1]@r"), H("a: r->s"))
    assert not v and v.witness == Word(())


def test_well_formed():
    assert check_well_formed(H(BSB))
    assert check_well_formed(H("a: r->s"))
    assert not check_well_formed(H("a: r->s ; b: t->u"))


def test_well_formed_output_persistent_style():
    assert check_well_formed(H(BSB), "op")


# -- connectedness -----------------------------------------------------------------------


def test_trans_sets():
    a = H("a: r1->r2")
    assert trans_initial(a) == trans_final(a) == {frozenset({"r1", "r2"})}
    assert trans_initial(ONE) == trans_final(ONE) == set()
    assert trans_initial(H("a: r->s ; b: t->u")) == {frozenset({"r", "s"})}
    assert trans_initial(H("1 ; b: t->u")) == {frozenset({"t", "u"})}
    assert trans_initial(H("scope X:{r,s,t}[a: r->s]")) == {frozenset({"r", "s", "t"})}
    assert trans_final(H("upd X @ r { a: r->s }")) == {frozenset({"r"})}


def test_bsb_connected():
    v = check_connected(H(BSB))
    assert v and all(v.parts.values())


def test_disconnected_sequence_fails():
    v = check_connected(H("a: r->s ; b: t->u"))
    assert not v and not v.parts["sequence"] and v.parts["choice"] and v.parts["parallel"]
    assert v.witness.subterm == H("a: r->s ; b: t->u")


def test_operation_interference():
    v = check_connected(H("(a: r->s) | (a: t->u)"))
    assert not v and not v.parts["parallel"]


def test_unique_point_of_choice():
    assert not unique_point_of_choice(H("a: r->s + b: t->u"))
    assert not unique_point_of_choice(H("a: r->s + (b: r->s ; c: s->t)"))
    assert unique_point_of_choice(H("a: r->s + b: r->s"))


# -- output persistence ------------------------------------------------------------------


def test_output_persistence_examples():
    assert check_output_persistent(C("tau; a!l"))
    assert check_output_persistent(C("a + (tau; c!l)"))
    v = check_output_persistent(C("a!l + b!l"))
    assert not v and isinstance(v.witness, Path)


def test_output_persistence_tick():
    assert not check_output_persistent(C("a!l + 1"))


def test_output_persistence_exemption_modes():
    c = C("a!l + a!m")
    assert not check_output_persistent(c)
    assert check_output_persistent(c, NAME_ONLY)


@settings(max_examples=200, deadline=None)
@given(contracts(max_leaves=8, persistent=True))
def test_tau_guarded_grammar_is_output_persistent(c):
    assert check_output_persistent(c)


# -- alphabets and restriction --------------------------------------------------------------


def test_alphabets():
    assert alphabets(C("a; b!s")) == ({"a"}, {"s"}, {"b"})
    assert alphabets(C("0")) == (set(), set(), set())
    buyer = project_role(H(BSB), "Buyer")
    assert alphabets(buyer) == ({"Offer", "Receipt"}, {"Seller", "Bank"}, {"Request", "Payment"})


def test_restrict_inputs():
    assert restrict_inputs(C("a + b"), {"b"}) == C("a + 0")
    assert restrict_inputs(C("a"), set()) == C("a")
    r = restrict_inputs(Seq(Input("a"), Input("b")), {"a"})
    assert r == Seq(Zero(), Input("b"))
    assert contract_lts(r).transitions == []


# -- random suites ------------------------------------------------------------------------


def _brute_difference(left, right, max_len):
    """Shortest word up to ``max_len`` in L(left) - L(right), by enumeration."""
    alphabet = sorted(left.alphabet() | right.alphabet(), key=repr)
    for n in range(max_len + 1):
        for w in product(alphabet, repeat=n):
            if left.accepts(w) and not right.accepts(w):
                return w
    return None


def test_trace_inclusion_witnesses_replay():
    rng = random.Random(7)
    checked = differences = 0
    while checked < 200:
        p = random_system(rng, 2, 3, ("a", "b"))
        h = random_chor(rng, 3, ("r0", "r1"), ("a", "b"))
        try:
            left = completed_traces(system_lts(p, max_states=5000))
            right = completed_traces(chor_lts(h, 5000))
        except StateBoundExceeded:
            continue
        word = automata.inclusion_counterexample(left, right)
        brute = _brute_difference(left, right, 4)
        if word is not None:
            differences += 1
            assert left.accepts(word) and not right.accepts(word)
            if brute is not None:
                assert len(word) == len(brute)
        else:
            assert brute is None
        checked += 1
    assert differences > 20


def test_compliance_witness_replays():
    rng = random.Random(11)
    found = 0
    for _ in range(300):
        p = random_system(rng, 2, 3, ("a", "b"))
        v = check_compliance(p)
        if not v:
            found += 1
            final = replay_path(p, v.witness)
            assert not any(isinstance(l, Tick) for _, l, _ in system_lts(final).transitions)
    assert found > 10
