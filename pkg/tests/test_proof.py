import json
import random

import pytest

from corpus import axp, ex1, ex1_fragment2, ex1_unrolled, exbad, fixture_text, impr_over_axp, proof_corpus
from kplus.formula import BOT, Box, BoxPlus, Imp, ParseError, Var
from kplus.proof import (
    BackLink,
    CyclicProof,
    Inference,
    ProofBuilder,
    ProofFormatError,
    Rule,
    check_proof,
    class_partition,
    dump_proof,
    fragment_equal,
    infer_annotations,
    load_proof,
    local_height,
    n_fragment,
    premise_sequents,
    proof_equal,
)
from kplus.sequent import CIRCLE, AnnotationError, Sequent

p, q = Var("p"), Var("q")
F = Imp(p, Box(p))


def test_ex1_is_valid_for_each_candidate():
    assert check_proof(ex1()).root_annotation is p
    assert check_proof(ex1(), p)
    assert check_proof(ex1(), CIRCLE)


def test_exbad_has_no_boxplus_right_premise_on_its_cycle():
    verdict = check_proof(exbad())
    assert not verdict
    assert verdict.reason == "NoBoxPlusRightOnPath"
    assert verdict.node == 2


def test_single_axioms_are_valid():
    assert check_proof(axp(Sequent((), [p], [p])))
    b = ProofBuilder()
    assert check_proof(b.build(b.add(Rule("axbot", Sequent((), [BOT], [])))))


def test_annotations_of_ex1():
    ann = infer_annotations(ex1(), p)
    assert ann == {0: p, 1: CIRCLE, 2: p, 3: p, 4: p}
    assert infer_annotations(axp(Sequent((), [p], [p])), CIRCLE) == {0: CIRCLE}
    with pytest.raises(AnnotationError):
        infer_annotations(ex1(), q)


def test_explicit_bad_annotation_is_reported():
    verdict = check_proof(ex1(), q)
    assert not verdict and verdict.reason == "AnnotationError"


def _broken(mutate) -> CyclicProof:
    data = json.loads(fixture_text("ex1.proof"))
    mutate(data["nodes"])
    return load_proof(json.dumps(data))


def test_bad_axiom_is_rejected():
    def mutate(nodes):
        nodes[4]["goal"] = "p, [+](p -> []p) => q, [+]p"
        nodes[2]["premises"] = [3, 4]

    verdict = check_proof(_broken(mutate))
    assert not verdict and verdict.reason == "BadRuleShape"

    b = ProofBuilder()
    lone = b.build(b.add(Rule("axp", Sequent((), [p], [q]))))
    verdict = check_proof(lone)
    assert not verdict and verdict.reason == "BadAxiom"


def test_dangling_backlink_is_rejected():
    def mutate(nodes):
        nodes[3]["target"] = 1

    verdict = check_proof(_broken(mutate))
    assert not verdict and verdict.reason == "DanglingBackLink" and verdict.node == 3


def test_wrong_decomposition_is_rejected():
    def mutate(nodes):
        nodes[0]["lambda"] = ["q"]

    verdict = check_proof(_broken(mutate))
    assert not verdict and verdict.reason == "BadRuleShape" and verdict.node == 0


def test_premise_sequents_of_modal_rules():
    rule = ex1().nodes[0].rule
    left, right = premise_sequents(rule)
    assert left == Sequent((), [p, F, BoxPlus(F)], [p])
    assert right == Sequent((), [p, F, BoxPlus(F)], [BoxPlus(p)])


def test_file_round_trip_on_corpus():
    for proof in proof_corpus(random.Random(3), 40):
        again = load_proof(dump_proof(proof))
        assert dump_proof(again) == dump_proof(proof)
        assert proof_equal(again, proof)


def test_unknown_fields_are_rejected():
    data = json.loads(fixture_text("ex1.proof"))
    data["nodes"][1]["comment"] = "x"
    with pytest.raises(ProofFormatError):
        load_proof(json.dumps(data))
    data = json.loads(fixture_text("ex1.proof"))
    data["extra"] = 1
    with pytest.raises(ProofFormatError):
        load_proof(json.dumps(data))


@pytest.mark.parametrize(
    "text, error",
    [
        ("{", ProofFormatError),
        ('{"version": 2, "root": 0, "nodes": []}', ProofFormatError),
        ('{"version": 1, "root": 0, "nodes": [{"id": 0, "rule": "nope", "goal": "=>"}]}', ProofFormatError),
        ('{"version": 1, "root": 0, "nodes": [{"id": 0, "rule": "axp"}]}', ProofFormatError),
        ('{"version": 1, "root": 0, "nodes": [{"id": 0, "rule": "axp", "goal": "p =>> p"}]}', ParseError),
    ],
)
def test_malformed_files(text, error):
    with pytest.raises(error):
        load_proof(text)


def test_proof_equality():
    assert proof_equal(ex1(), ex1_unrolled())
    assert not proof_equal(ex1(), exbad())
    single = axp(Sequent((), [p], [p]))
    assert proof_equal(single, axp(Sequent((), [p], [p])))


def test_proof_equality_is_an_equivalence_on_a_corpus():
    corpus = proof_corpus(random.Random(4), 25) + [ex1_unrolled()]
    for a in corpus:
        assert proof_equal(a, a)
    rng = random.Random(5)
    for _ in range(200):
        a, b, c = rng.choice(corpus), rng.choice(corpus), rng.choice(corpus)
        assert proof_equal(a, b) == proof_equal(b, a)
        if proof_equal(a, b) and proof_equal(b, c):
            assert proof_equal(a, c)


def test_local_height():
    assert local_height(ex1()) == 0
    assert local_height(axp(Sequent((), [p], [p]))) == 0
    assert local_height(impr_over_axp()) == 1


def test_class_partition():
    classes = class_partition(ex1(), p)
    assert classes[0] == classes[2] == classes[3] == classes[4]
    assert classes[1] != classes[0]
    assert len(set(class_partition(axp(Sequent((), [p], [p])), CIRCLE).values())) == 1
    parts = class_partition(impr_over_axp(), CIRCLE)
    assert len(parts) == 2 and len(set(parts.values())) == 1


def test_fragment_examples():
    assert fragment_equal(ex1(), ex1_unrolled(), p, 2)
    assert fragment_equal(ex1(), exbad(), p, 0)
    single = axp(Sequent((), [p, Box(p), BoxPlus(F)], [BoxPlus(p)]))
    assert not fragment_equal(ex1(), single, p, 1)


def test_two_fragment_of_ex1_matches_the_fixture():
    expected = ex1_fragment2()

    def as_lists(t):
        if t == "cut":
            return t
        kind, goal, ann, kids = t
        return [kind, goal, ann, [as_lists(k) for k in kids]]

    assert as_lists(n_fragment(ex1(), p, expected["n"])) == expected["tree"]
    assert n_fragment(ex1(), p, 0) is None


def test_backlinks_and_inferences_are_distinct_node_kinds():
    nodes = ex1().nodes
    assert isinstance(nodes[3], BackLink) and nodes[3].target == 0
    assert all(isinstance(nodes[i], Inference) for i in (0, 1, 2, 4))
    assert ex1().node_count() == 4 and ex1().backlink_count() == 1
