import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from corpus import formulas, random_sequent
from kplus.formula import BOT, Box, BoxPlus, Imp, ParseError, Var
from kplus.sequent import (
    CIRCLE,
    AnnotatedSequent,
    AnnotationError,
    Multiset,
    Sequent,
    annotation_candidates,
    parse_annotation,
    parse_goal,
    parse_sequent,
    print_annotation,
    print_goal,
    print_sequent,
)

p, q = Var("p"), Var("q")
F = Imp(p, Box(p))
multisets = st.lists(formulas(3), max_size=6).map(Multiset)


def test_parse_sequent_examples():
    s = parse_sequent("{ } ; p, []p, [+](p -> []p) => [+]p")
    assert s == Sequent((), [p, Box(p), BoxPlus(F)], [BoxPlus(p)])
    assert parse_sequent("{ p } ; => p") == Sequent([p], [], [p])
    assert parse_sequent("{ } ; p =>") == Sequent((), [p], [])


def test_sigma_is_deduplicated():
    s = parse_sequent("{ p, p, q } ; => ")
    assert s.sigma == frozenset({p, q})


def test_parse_sequent_errors():
    for bad in ["p => q", "{ } p => q", "{ } ; p, => q", "{ } ; p q"]:
        with pytest.raises(ParseError):
            parse_sequent(bad)


def test_sequent_round_trip_on_random_sequents():
    rng = random.Random(7)
    for _ in range(200):
        s = random_sequent(rng)
        assert parse_sequent(print_sequent(s)) == s
        assert parse_goal(print_goal(s), s.sigma) == s


def test_multiplicities_matter():
    assert Sequent((), [p, p], [p]) != Sequent((), [p], [p])
    assert Sequent((), [q, p], []) == Sequent((), [p, q], [])


def test_initial_sequents():
    assert Sequent((), [p], [p]).is_initial()
    assert Sequent((), [BOT], []).is_initial()
    assert not Sequent((), [Box(p)], [Box(p)]).is_initial()
    assert not Sequent((), [], [BOT]).is_initial()


def test_annotation_candidates_examples():
    s = Sequent((), [p, Box(p), BoxPlus(F)], [BoxPlus(p)])
    assert annotation_candidates(s) == [CIRCLE, p]
    assert annotation_candidates(Sequent((), [], [p])) == [CIRCLE]
    assert annotation_candidates(Sequent((), [], [BoxPlus(p), BoxPlus(p)])) == [CIRCLE, p]


@given(multisets, multisets)
def test_candidates_follow_the_definition(gamma, delta):
    s = Sequent((), gamma, delta)
    cands = annotation_candidates(s)
    assert cands[0] is CIRCLE
    assert set(cands[1:]) == {f.body for f in delta if isinstance(f, BoxPlus)}
    assert len(cands) == len(set(cands))


def test_annotated_sequent_requires_boxplus():
    s = Sequent((), [], [BoxPlus(p)])
    assert AnnotatedSequent(s, p).ann is p
    assert AnnotatedSequent(s, CIRCLE).ann is CIRCLE
    with pytest.raises(AnnotationError):
        AnnotatedSequent(s, q)


def test_annotation_text():
    assert print_annotation(CIRCLE) == "circle"
    assert parse_annotation("circle") is CIRCLE
    assert parse_annotation("◦") is CIRCLE
    assert parse_annotation("[]p") is Box(p)


@given(multisets, multisets)
def test_union_then_difference_is_inverse(m, n):
    assert (m + n).minus(n) == m


@given(multisets, multisets)
def test_multiset_laws(m, n):
    assert m + n == n + m
    assert len(m + n) == len(m) + len(n)
    assert m.issubset(m + n)
    u = m.union_max(n)
    assert m.issubset(u) and n.issubset(u)
    for f in u.distinct():
        assert u.count(f) == max(m.count(f), n.count(f))
    d = m.truncated_minus(n)
    for f in m.distinct():
        assert d.count(f) == max(0, m.count(f) - n.count(f))
    assert not m.deduplicated().has_repetitions()


def test_exact_difference_rejects_missing_items():
    with pytest.raises(ValueError):
        Multiset([p]).minus([q])
    with pytest.raises(ValueError):
        Multiset([p]).minus([p, p])


def test_multiset_is_canonically_ordered():
    m = Multiset([BoxPlus(p), q, p, q])
    assert list(m) == [p, q, q, BoxPlus(p)]
    assert m.items == ((p, 1), (q, 2), (BoxPlus(p), 1))
