import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corpus import formulas
from kplus.formula import (
    BOT,
    Box,
    BoxPlus,
    Imp,
    ParseError,
    Var,
    canonical_sorted,
    conj,
    conj_all,
    disj,
    disj_all,
    neg,
    parse_formula,
    print_formula,
    subformula_closure,
    top,
)

p, q, r = Var("p"), Var("q"), Var("r")


def test_parse_examples():
    assert parse_formula("false") is BOT
    assert parse_formula("[+](p -> []p)") is BoxPlus(Imp(p, Box(p)))
    assert parse_formula("  ( p->  q )") is Imp(p, q)


def test_parse_error_reports_offset_and_expectations():
    with pytest.raises(ParseError) as info:
        parse_formula("([]p ->")
    assert info.value.offset == 7
    assert "false" in info.value.expected


def test_parse_error_offsets_are_bytes():
    with pytest.raises(ParseError) as info:
        parse_formula("(p -> ◦)")
    assert info.value.offset == 6
    with pytest.raises(ParseError) as info:
        parse_formula("(◦ -> ")
    assert info.value.offset == 1


@pytest.mark.parametrize("bad", ["", "p q", "(p)", "[]", "(p -> q", "p -> q", "[+"])
def test_malformed_inputs_raise(bad):
    with pytest.raises(ParseError):
        parse_formula(bad)


def test_print_examples():
    assert print_formula(BOT) == "false"
    assert print_formula(Imp(p, Box(p))) == "(p -> []p)"
    assert print_formula(BoxPlus(q)) == "[+]q"


@settings(max_examples=300)
@given(formulas(max_depth=8))
def test_parse_print_round_trip(f):
    assert parse_formula(print_formula(f)) is f


@given(formulas(4), formulas(4))
def test_structural_equality_is_identity(a, b):
    assert (a == b) == (a is b)
    assert Imp(a, b) is Imp(a, b)


@given(formulas(4), formulas(4), formulas(4))
def test_canonical_order_is_strict_total(a, b, c):
    assert not a < a
    assert (a < b) + (b < a) + (a is b) == 1
    if a < b and b < c:
        assert a < c


def test_canonical_order_by_constructor():
    assert canonical_sorted([BoxPlus(p), Box(p), Imp(p, p), q, p, BOT]) == [BOT, p, q, Imp(p, p), Box(p), BoxPlus(p)]


def test_derived_connectives_expand_to_primitives():
    assert neg(p) is Imp(p, BOT)
    assert top() is Imp(BOT, BOT)
    assert conj(p, q) is Imp(Imp(p, Imp(q, BOT)), BOT)
    assert disj(p, q) is Imp(Imp(p, BOT), q)


def test_folds_use_canonical_order_and_units():
    assert conj_all([]) is top()
    assert disj_all([]) is BOT
    assert conj_all([q]) is q
    assert conj_all([q, p]) is conj(p, q)
    assert disj_all([r, p, q]) is disj(disj(p, q), r)


def test_subformula_closure_examples():
    assert subformula_closure([Box(p)]) == {Box(p), p}
    assert subformula_closure([]) == frozenset()
    f = BoxPlus(Imp(p, Box(p)))
    assert subformula_closure([f]) == {f, Imp(p, Box(p)), p, Box(p)}


@given(formulas(6))
def test_closure_is_bounded_by_size(f):
    closure = subformula_closure([f])
    assert len(closure) <= f.size
    for g in closure:
        assert set(g.children()) <= closure


@given(st.lists(formulas(3), max_size=5))
def test_closure_is_idempotent(fs):
    once = subformula_closure(fs)
    assert subformula_closure(once) == once


def test_formulas_are_immutable():
    with pytest.raises(AttributeError):
        p.name = "q"


def test_small_enumeration_round_trips():
    leaves = [BOT, p, q]
    layer = leaves + [Box(x) for x in leaves] + [BoxPlus(x) for x in leaves]
    for a, b in itertools.product(layer, repeat=2):
        f = Imp(a, b)
        assert parse_formula(print_formula(f)) is f
