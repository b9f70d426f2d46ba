"""Removal of a single cut and elimination of all cuts.

``re_node(a, left, right)`` proves the cut result of a cut pair without
emitting the cut.  The definition dispatches on the shape of the cut formula
and, for variables and modal formulas, on the last rules of the two sides:

* initial sequents are closed directly;
* a cut formula that is not principal on the left is pushed up through the
  left proof;
* a modal cut formula principal on the left but not a side formula of the
  right's modal rule is pushed up through the right proof;
* otherwise the two modal rules meet and the cut moves onto their premises.

``ce_node`` replaces every cut of a proof by ``re_node`` and makes every
modal rule slim by contracting its premise.
"""

from __future__ import annotations

from dataclasses import replace

from .admissible import (
    LeftImp,
    RightImp,
    Side,
    UnBot,
    UnImp,
    ac_node,
    apply_to,
    ctr_node,
    inv_node,
    wk_node,
)
from .engine import Fuel, Node, ProofStream, Step, regularize, stream_of
from .formula import Bot, Box, Formula, Imp, Var
from .proof import CyclicProof, Rule, axiom, boxplussed, check_proof
from .sequent import CIRCLE, EMPTY, Annotation, Multiset, Sequent, annotation_candidates

__all__ = ["cut_result", "re_node", "ce_node", "remove_cut", "eliminate_cuts"]


def cut_result(a: Formula, left: Sequent, right: Sequent) -> Sequent | None:
    """``Gamma => Delta`` when left proves ``Gamma => a, Delta`` and right ``Gamma, a => Delta``."""
    if left.sigma != right.sigma or a not in left.delta or a not in right.gamma:
        return None
    delta = left.delta.minus([a])
    gamma = right.gamma.minus([a])
    if left.gamma != gamma or right.delta != delta:
        return None
    return Sequent(left.sigma, gamma, delta)


def re_node(a: Formula, left: Node, right: Node) -> Node:
    """A proof of the cut result of ``(left, right)``; ``left`` itself if they do not form a cut pair."""
    seq = cut_result(a, left.sequent, right.sequent)
    if seq is None:
        return left
    return left.engine.node(("re", a, left, right), seq, lambda: _remove(a, left, right, seq))


def _remove(a: Formula, left: Node, right: Node, seq: Sequent):
    match a:
        case Bot():
            return inv_node(UnBot(), left)
        case Imp(b, c):
            first = wk_node(EMPTY, Multiset([c]), inv_node(RightImp(a), right))
            inner = re_node(b, first, inv_node(UnImp(a), left))
            return re_node(c, inner, inv_node(LeftImp(a), right))
        case Var():
            ls = left.force()
            if ls.rule.is_axiom:
                if seq.is_initial():
                    return Step(axiom(seq), ())
                return ac_node(Side.LEFT, a, right)
            return _up_left(a, ls, right, seq)
    ls = left.force()
    rs = right.force()
    if ls.rule.is_axiom or rs.rule.is_axiom:
        return Step(axiom(seq), ())
    if not (ls.rule.is_modal and ls.rule.principal is a):
        return _up_left(a, ls, right, seq)
    r = rs.rule
    body = a.body
    if not r.is_modal or body not in (r.lam if isinstance(a, Box) else r.pi):
        return _up_right(a, left, rs, seq)
    if isinstance(a, Box):
        return _meet_box(ls, rs, seq)
    if a in seq.delta:
        return Step(replace(ls.rule, conclusion=seq), ls.premises)
    return _meet_boxplus(ls, rs, seq)


def _up_left(a: Formula, ls: Step, right: Node, seq: Sequent):
    """Push the cut above the last rule of the left proof."""
    rule = ls.rule
    new = replace(rule, conclusion=seq)
    if rule.is_modal:
        return Step(new, ls.premises)
    if rule.kind == "impr":
        (p0,) = ls.premises
        return Step(new, (re_node(a, p0, inv_node(UnImp(rule.principal), right)),))
    if rule.kind == "impl":
        p0, p1 = ls.premises
        pivot = rule.principal
        return Step(
            new,
            (
                re_node(a, p0, inv_node(LeftImp(pivot), right)),
                re_node(a, p1, inv_node(RightImp(pivot), right)),
            ),
        )
    if rule.kind == "cut":
        p0, p1 = ls.premises
        d = Multiset([rule.cut_formula])
        return Step(
            new,
            (re_node(a, p0, wk_node(EMPTY, d, right)), re_node(a, p1, wk_node(d, EMPTY, right))),
        )
    raise AssertionError(f"unexpected rule {rule.kind} on the left of a cut")


def _up_right(a: Formula, left: Node, rs: Step, seq: Sequent):
    """Push the cut above the last rule of the right proof."""
    rule = rs.rule
    new = replace(rule, conclusion=seq)
    if rule.is_modal:
        return Step(new, rs.premises)
    if rule.kind == "impr":
        (t0,) = rs.premises
        return Step(new, (re_node(a, inv_node(UnImp(rule.principal), left), t0),))
    if rule.kind == "impl":
        t0, t1 = rs.premises
        pivot = rule.principal
        return Step(
            new,
            (
                re_node(a, inv_node(LeftImp(pivot), left), t0),
                re_node(a, inv_node(RightImp(pivot), left), t1),
            ),
        )
    if rule.kind == "cut":
        t0, t1 = rs.premises
        d = Multiset([rule.cut_formula])
        return Step(
            new,
            (re_node(a, wk_node(EMPTY, d, left), t0), re_node(a, wk_node(d, EMPTY, left), t1)),
        )
    raise AssertionError(f"unexpected rule {rule.kind} on the right of a cut")


def _merge(l_rule: Rule, r_rule: Rule, lam_r: Multiset, pi_r: Multiset):
    """Joint decomposition of two modal rules and the weakenings reaching it."""
    sigma0 = l_rule.sigma0 | r_rule.sigma0
    lam = l_rule.lam.union_max(lam_r)
    pi = l_rule.pi.union_max(pi_r)

    def extra(s0, lam0, pi0) -> Multiset:
        more_pi = pi.truncated_minus(pi0)
        return Multiset(sigma0 - s0) + lam.truncated_minus(lam0) + more_pi + boxplussed(more_pi)

    to_left = extra(l_rule.sigma0, l_rule.lam, l_rule.pi)
    to_right = extra(r_rule.sigma0, lam_r, pi_r)
    return sigma0, lam, pi, to_left, to_right


def _meet_box(ls: Step, rs: Step, seq: Sequent):
    """A box rule proving the cut formula meets a modal rule using it as a side formula."""
    l_rule, r_rule = ls.rule, rs.rule
    b = l_rule.principal.body
    sigma0, lam, pi, to_left, to_right = _merge(
        l_rule, r_rule, r_rule.lam.minus([b]), r_rule.pi
    )
    (p0,) = ls.premises
    target = r_rule.principal
    premises = [re_node(b, wk_node(to_left, Multiset([target.body]), p0), wk_node(to_right, EMPTY, rs.premises[0]))]
    if r_rule.kind == "boxplus":
        premises.append(
            re_node(b, wk_node(to_left, Multiset([target]), p0), wk_node(to_right, EMPTY, rs.premises[1]))
        )
    rule = Rule(r_rule.kind, seq, principal=target, sigma0=sigma0, lam=lam, pi=pi)
    return Step(rule, tuple(premises))


def _meet_boxplus(ls: Step, rs: Step, seq: Sequent):
    """A [+] rule proving the cut formula meets a modal rule using it as a side formula."""
    l_rule, r_rule = ls.rule, rs.rule
    a = l_rule.principal
    b = a.body
    sigma0, lam, pi, to_left, to_right = _merge(
        l_rule, r_rule, r_rule.lam, r_rule.pi.minus([b])
    )
    p0, p1 = ls.premises
    target = r_rule.principal
    outs = [Multiset([target.body])]
    if r_rule.kind == "boxplus":
        outs.append(Multiset([target]))
    premises = []
    for out, t in zip(outs, rs.premises):
        step_left = wk_node(to_left, out, p0)
        loop_left = wk_node(to_left + [b], out, p1)
        inner = re_node(a, loop_left, wk_node(to_right, EMPTY, t))
        premises.append(re_node(b, step_left, inner))
    rule = Rule(r_rule.kind, seq, principal=target, sigma0=sigma0, lam=lam, pi=pi)
    return Step(rule, tuple(premises))


def ce_node(x: Node) -> Node:
    """The cut-free slim proof obtained by removing every cut of ``x``."""

    def compute():
        step = x.force()
        rule = step.rule
        if rule.is_axiom:
            return x
        if rule.kind == "cut":
            p0, p1 = step.premises
            return re_node(rule.cut_formula, ce_node(p0), ce_node(p1))
        if rule.is_modal:
            slim = replace(rule, lam=rule.lam.deduplicated(), pi=rule.pi.deduplicated())
            premises = tuple(
                ctr_node(rule.lam, EMPTY, ctr_node(rule.pi, EMPTY, ctr_node(boxplussed(rule.pi), EMPTY, ce_node(c))))
                for c in step.premises
            )
            return Step(slim, premises)
        return Step(rule, tuple(ce_node(c) for c in step.premises))

    return x.engine.node(("ce", x), x.sequent, compute)


# -- public wrappers -------------------------------------------------------------


def remove_cut(a: Formula, left, right, fuel: Fuel | int | None = None):
    """Cut-free proof of the cut result (a stream for streams, regularized for cyclic proofs)."""
    if isinstance(left, CyclicProof) and isinstance(right, CyclicProof):
        ls = stream_of(left)
        rs = stream_of(right, engine=ls.engine)
        return regularize(ProofStream(re_node(a, ls.node, rs.node)), fuel)
    if isinstance(left, ProofStream) and isinstance(right, ProofStream):
        node = re_node(a, left.node, right.node)
        ann = left.ann if any(left.ann is c for c in annotation_candidates(node.sequent)) else CIRCLE
        return ProofStream(node, ann)
    raise TypeError("remove_cut needs two streams or two cyclic proofs")


def eliminate_cuts(
    p: CyclicProof, root_ann: Annotation | str = "auto", fuel: Fuel | int | None = None
) -> CyclicProof:
    """A slim cut-free cyclic proof of the endsequent of ``p``."""
    if root_ann == "auto":
        verdict = check_proof(p)
        root_ann = verdict.root_annotation if verdict else CIRCLE
    return apply_to_annotated(p, root_ann, ce_node, fuel)


def apply_to_annotated(p: CyclicProof, ann: Annotation, op, fuel) -> CyclicProof:
    s = stream_of(p, ann)
    return regularize(ProofStream(op(s.node), ann), fuel)


def ce(s: ProofStream) -> ProofStream:
    return ProofStream(ce_node(s.node), s.ann)


__all__ += ["ce", "apply_to"]
