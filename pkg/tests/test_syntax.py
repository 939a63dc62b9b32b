import pytest
from hypothesis import given, settings

from chorver.syntax import (
    LOCATED, UNLOCATED, ParseError, canonical, parse_choreography, parse_contract,
    parse_system, render, simplify, validate_system,
)
from chorver.terms import (
    ONE, TAU_ACTION, ZERO, Choice, EndpointScope, EndpointUpdate, FreeOutput, Input,
    Interaction, LocOutput, Par, Scope, Seq, Star, System, Update,
)

from strategies import chors, contracts, systems


def test_interaction():
    assert parse_choreography("a: r->s") == Interaction("a", "r", "s")


def test_star_of_sequence():
    h = parse_choreography("(a: r->s ; b: r->s)*")
    assert h == Star(Seq(Interaction("a", "r", "s"), Interaction("b", "r", "s")))


def test_scope_inactive_by_default():
    h = parse_choreography("scope X:{r,s}[ a: r->s ]")
    assert h == Scope("X", frozenset({"r", "s"}), Interaction("a", "r", "s"), False)
    assert parse_choreography("active scope X:{r}[1]").active


def test_update():
    h = parse_choreography("upd X @ r { a: r->s }")
    assert h == Update("X", "r", Interaction("a", "r", "s"))


def test_precedence_star_seq_par_choice():
    h = parse_choreography("a: r->s + b: r->s | c: r->s ; d: r->s*")
    a, b, c, d = (Interaction(x, "r", "s") for x in "abcd")
    assert h == Choice(a, Par(b, Seq(c, Star(d))))


def test_left_associative():
    h = parse_choreography("a: r->s ; b: r->s ; c: r->s")
    a, b, c = (Interaction(x, "r", "s") for x in "abc")
    assert h == Seq(Seq(a, b), c)


def test_comments_and_newlines():
    h = parse_choreography("# header\na: r->s ;  # first\n b: s->r\n")
    assert h == Seq(Interaction("a", "r", "s"), Interaction("b", "s", "r"))


def test_contract_forms():
    assert parse_contract("tau ; a!s") == Seq(TAU_ACTION, LocOutput("a", "s"))
    assert parse_contract("a!") == FreeOutput("a")
    assert parse_contract("a! ; b") == Seq(FreeOutput("a"), Input("b"))
    assert parse_contract("a!s ; b") == Seq(LocOutput("a", "s"), Input("b"))
    assert parse_contract("0 + 1") == Choice(ZERO, ONE)


def test_endpoint_scope_and_update():
    c = parse_contract("scope X[a] ; upd X @ (r,s) { b!s ;; b }")
    assert c == Seq(EndpointScope("X", Input("a")),
                    EndpointUpdate("X", ("r", "s"), (LocOutput("b", "s"), Input("b"))))


def test_endpoint_update_arity_mismatch():
    with pytest.raises(ParseError):
        parse_contract("upd X @ (r,s) { b }")


def test_system():
    p = parse_system("[ a ] @ s || [ tau; a!s ] @ r")
    assert p.roles == ("s", "r")
    assert p.contract("r") == Seq(TAU_ACTION, LocOutput("a", "s"))
    assert parse_system("[ 1 ] @ r") == System((("r", ONE),))


def test_parse_error_position():
    with pytest.raises(ParseError) as e:
        parse_choreography("a: r->s ;\n  ; b: r->s")
    assert (e.value.line, e.value.col) == (2, 3)
    assert e.value.expected


def test_trailing_garbage():
    with pytest.raises(ParseError):
        parse_choreography("a: r->s )")


@pytest.mark.parametrize("term,text", [
    (Interaction("a", "r", "s"), "a: r->s"),
    (ONE, "1"),
    (Seq(TAU_ACTION, LocOutput("a", "s")), "(tau ; a!s)"),
    (Star(Input("a")), "(a)*"),
])
def test_render(term, text):
    assert render(term) == text


def test_validate_ok():
    assert validate_system(parse_system("[a]@s || [tau;a!s]@r"), LOCATED)


def test_validate_self_output():
    v = validate_system(parse_system("[ a!r ] @ r"), LOCATED)
    assert not v and v.witness.condition == "self-output"


def test_validate_free_output_by_mode():
    p = parse_system("[a!]@r || [a]@s")
    assert not validate_system(p, LOCATED)
    assert validate_system(p, UNLOCATED)


def test_validate_duplicate_roles_any_order():
    p1 = parse_system("[a]@r || [1]@s || [1]@r")
    p2 = parse_system("[1]@r || [a]@r || [1]@s")
    assert not validate_system(p1) and not validate_system(p2)


def test_simplify_units():
    c = parse_contract("(1 ; a) | (b ; 1) ; (1)*")
    assert simplify(c) == Par(Input("a"), Input("b"))


def test_canonical_ignores_par_order():
    a = parse_system("[(x!r | y!s) ; 1]@t")
    b = parse_system("[y!s | x!r]@t")
    assert canonical(a) == canonical(b)


@settings(max_examples=200)
@given(chors(max_leaves=16, scopes=True))
def test_roundtrip_choreographies(h):
    assert parse_choreography(render(h)) == h


@settings(max_examples=200)
@given(contracts(max_leaves=16, free=True, scopes=True))
def test_roundtrip_contracts(c):
    assert parse_contract(render(c)) == c


@settings(max_examples=100)
@given(systems(free=True))
def test_roundtrip_systems(p):
    assert parse_system(render(p)) == p
