import random

import pytest

from corpus import axp, cut_pairs, ex1, proof_corpus
from kplus.admissible import identity_proof, weaken
from kplus.cutelim import cut_result, eliminate_cuts, remove_cut
from kplus.engine import ProofStream, stream_of
from kplus.formula import Box, BoxPlus, Imp, Var
from kplus.hilbert import AxiomV, hilbert_to_sequent
from kplus.proof import ProofBuilder, Rule, check_proof, proof_equal
from kplus.sequent import Multiset, Sequent

p, q, r = Var("p"), Var("q"), Var("r")


def test_cut_result():
    left = Sequent((), [q], [p, r])
    right = Sequent((), [q, p], [r])
    assert cut_result(p, left, right) == Sequent((), [q], [r])
    assert cut_result(q, left, right) is None
    assert cut_result(p, left, Sequent((), [q, p], [])) is None


def test_atomic_cut_between_axioms():
    left = axp(Sequent((), [p], [p, p]))
    right = axp(Sequent((), [p, p], [p]))
    out = remove_cut(p, left, right)
    assert len(out.nodes) == 1
    assert out.nodes[out.root].rule == Rule("axp", Sequent((), [p], [p]))


def test_boxplus_cut_between_identities():
    a = BoxPlus(p)
    left = identity_proof((), (), a, [a])
    right = identity_proof((), [a], a, ())
    out = remove_cut(a, left, right)
    assert out.endsequent == Sequent((), [a], [a])
    assert check_proof(out) and out.is_cut_free() and out.is_slim()


def test_implication_cut_against_implication_left():
    a = Imp(q, r)
    left = weaken([q], (), identity_proof((), (), a, ()))
    b = ProofBuilder()
    goal = Sequent((), [q, a], [r])
    root = b.add(
        Rule("impl", goal, principal=a),
        [b.add(Rule("axp", Sequent((), [q, r], [r]))), b.add(Rule("axp", Sequent((), [q], [q, r])))],
    )
    right = weaken([a], (), b.build(root))
    left = weaken((), [r], left)
    out = remove_cut(a, left, right)
    assert out.endsequent == cut_result(a, left.endsequent, right.endsequent)
    assert check_proof(out) and out.is_cut_free()


def test_non_pairs_return_the_left_stream():
    s = stream_of(ex1(), p)
    t = stream_of(ex1(), p, engine=s.engine)
    out = remove_cut(q, s, t)
    assert isinstance(out, ProofStream)
    assert out.node is s.node


def test_remove_cut_needs_matching_argument_types():
    with pytest.raises(TypeError):
        remove_cut(p, ex1(), stream_of(ex1()))


def test_eliminate_cuts_is_vacuous_on_ex1():
    assert proof_equal(eliminate_cuts(ex1()), ex1())


def test_eliminate_cuts_on_a_weakened_cut():
    a = BoxPlus(p)
    ident = identity_proof((), (), q, ())
    b = ProofBuilder()
    root = b.reserve()
    b.put(
        root,
        Rule("cut", Sequent((), [q], [q]), cut_formula=a),
        [b.graft(weaken((), [a], ident)), b.graft(weaken([a], (), ident))],
    )
    proof = b.build(root)
    assert check_proof(proof) and not proof.is_cut_free()
    out = eliminate_cuts(proof)
    assert out.endsequent == Sequent((), [q], [q])
    assert check_proof(out) and out.is_cut_free()


def test_eliminate_cuts_on_axiom_five():
    proof = hilbert_to_sequent(AxiomV(p))
    out = eliminate_cuts(proof)
    assert out.endsequent == proof.endsequent
    assert check_proof(out) and out.is_cut_free() and out.is_slim()


def test_eliminate_cuts_makes_modal_rules_slim():
    b = ProofBuilder()
    goal = Sequent((), [Box(p), Box(p)], [Box(p)])
    top = b.add(Rule("axp", Sequent((), [p, p], [p])))
    root = b.add(Rule("box", goal, principal=Box(p), lam=Multiset([p, p])), [top])
    fat = b.build(root)
    assert check_proof(fat) and not fat.is_slim()
    out = eliminate_cuts(fat)
    assert check_proof(out) and out.is_slim()
    assert out.nodes[out.root].rule.lam == Multiset([p])


def test_single_cut_corpus_sample():
    for a, left, right in cut_pairs(random.Random(31), 30):
        out = remove_cut(a, left, right, fuel=10**6)
        assert out.endsequent == cut_result(a, left.endsequent, right.endsequent)
        assert check_proof(out)
        assert out.is_cut_free()


def test_idempotence_sample():
    for proof in proof_corpus(random.Random(32), 10):
        assert proof_equal(eliminate_cuts(proof), proof)
