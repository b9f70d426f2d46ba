"""Admissible structural rules as proof transformations.

Each operation exists at two levels.  The node level (``*_node``) builds a
lazy, hash-consed node in the argument's engine and is what cut elimination
composes.  The public level accepts a :class:`ProofStream` (and returns one)
or a :class:`CyclicProof` (unfolded, transformed, then regularized back).

Weakening, the inversions and atomic contraction rewrite only the region
below the first modal premises: a modal rule absorbs the change into its
side contexts and keeps its premises untouched.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, replace
from enum import Enum
from functools import lru_cache
from typing import ClassVar, Iterable, Union

from .engine import Engine, Fuel, Node, ProofStream, Step, regularize, stream_of
from .formula import BOT, Bot, Box, BoxPlus, Formula, Imp, Var, print_formula
from .proof import CyclicProof, ProofBuilder, Rule, check_proof
from .sequent import CIRCLE, EMPTY, Annotation, Multiset, Sequent, annotation_candidates

__all__ = [
    "ShapeError",
    "InversionKind",
    "LeftImp",
    "RightImp",
    "UnImp",
    "UnBot",
    "Side",
    "identity_proof",
    "weaken",
    "invert",
    "atomic_contract",
    "contract",
    "identity_node",
    "wk_node",
    "inv_node",
    "ac_node",
    "ctr_node",
]


class ShapeError(ValueError):
    """The endsequent does not have the shape an operation needs."""


# -- inversion kinds -----------------------------------------------------------


@dataclass(frozen=True)
class InversionKind:
    tag: ClassVar[str] = ""

    def target(self, s: Sequent) -> Sequent:
        raise NotImplementedError


def _need_imp(pivot: Formula) -> Imp:
    if not isinstance(pivot, Imp):
        raise ShapeError(f"inversion pivot must be an implication, not {print_formula(pivot)}")
    return pivot


@dataclass(frozen=True)
class LeftImp(InversionKind):
    """``Gamma, A->B => Delta`` to ``Gamma, B => Delta``."""

    pivot: Imp
    tag: ClassVar[str] = "li"

    def target(self, s: Sequent) -> Sequent:
        a = _need_imp(self.pivot)
        if a not in s.gamma:
            raise ShapeError(f"{print_formula(a)} is not on the left")
        return s.with_zones(gamma=s.gamma.minus([a]) + [a.right])


@dataclass(frozen=True)
class RightImp(InversionKind):
    """``Gamma, A->B => Delta`` to ``Gamma => A, Delta``."""

    pivot: Imp
    tag: ClassVar[str] = "ri"

    def target(self, s: Sequent) -> Sequent:
        a = _need_imp(self.pivot)
        if a not in s.gamma:
            raise ShapeError(f"{print_formula(a)} is not on the left")
        return s.with_zones(gamma=s.gamma.minus([a]), delta=s.delta + [a.left])


@dataclass(frozen=True)
class UnImp(InversionKind):
    """``Gamma => A->B, Delta`` to ``Gamma, A => B, Delta``."""

    pivot: Imp
    tag: ClassVar[str] = "i"

    def target(self, s: Sequent) -> Sequent:
        a = _need_imp(self.pivot)
        if a not in s.delta:
            raise ShapeError(f"{print_formula(a)} is not on the right")
        return s.with_zones(gamma=s.gamma + [a.left], delta=s.delta.minus([a]) + [a.right])


@dataclass(frozen=True)
class UnBot(InversionKind):
    """``Gamma => false, Delta`` to ``Gamma => Delta``."""

    tag: ClassVar[str] = "ibot"

    def target(self, s: Sequent) -> Sequent:
        if BOT not in s.delta:
            raise ShapeError("false is not on the right")
        return s.with_zones(delta=s.delta.minus([BOT]))


class Side(Enum):
    LEFT = "left"
    RIGHT = "right"


# -- node level ------------------------------------------------------------------


def _same_rule(rule: Rule, conclusion: Sequent) -> Rule:
    return replace(rule, conclusion=conclusion)


def wk_node(phi: Multiset, psi: Multiset, x: Node) -> Node:
    """Weaken by ``phi`` on the left and ``psi`` on the right."""
    if not phi and not psi:
        return x
    if x.tag == "wk":
        _, phi0, psi0, inner = x.key
        phi, psi, x = phi0 + phi, psi0 + psi, inner
    seq = x.sequent.weakened(phi, psi)

    def compute():
        step = x.force()
        rule = step.rule
        if rule.is_modal or rule.is_axiom:
            return Step(_same_rule(rule, seq), step.premises)
        return Step(_same_rule(rule, seq), tuple(wk_node(phi, psi, c) for c in step.premises))

    return x.engine.node(("wk", phi, psi, x), seq, compute)


_TAKE_PREMISE = {("li", "impl"): 0, ("ri", "impl"): 1, ("i", "impr"): 0}


def inv_node(kind: InversionKind, x: Node) -> Node:
    seq = kind.target(x.sequent)

    def compute():
        step = x.force()
        rule = step.rule
        index = _TAKE_PREMISE.get((kind.tag, rule.kind))
        if index is not None and rule.principal is kind.pivot:
            return step.premises[index]
        if rule.is_modal or rule.is_axiom:
            return Step(_same_rule(rule, seq), step.premises)
        return Step(_same_rule(rule, seq), tuple(inv_node(kind, c) for c in step.premises))

    return x.engine.node(("inv", kind, x), seq, compute)


def ac_node(side: Side, p: Var, x: Node) -> Node:
    """Remove one of at least two copies of the variable ``p`` on ``side``."""
    s = x.sequent
    zone = s.gamma if side is Side.LEFT else s.delta
    if not isinstance(p, Var):
        raise ShapeError(f"atomic contraction needs a variable, not {print_formula(p)}")
    if zone.count(p) < 2:
        raise ShapeError(f"{print_formula(p)} occurs fewer than twice on the {side.value}")
    if side is Side.LEFT:
        seq = s.with_zones(gamma=s.gamma.minus([p]))
    else:
        seq = s.with_zones(delta=s.delta.minus([p]))

    def compute():
        step = x.force()
        rule = step.rule
        if rule.is_modal or rule.is_axiom:
            return Step(_same_rule(rule, seq), step.premises)
        return Step(_same_rule(rule, seq), tuple(ac_node(side, p, c) for c in step.premises))

    return x.engine.node(("ac", side, p, x), seq, compute)


def identity_node(engine: Engine, sigma, gamma: Multiset, a: Formula, delta: Multiset) -> Node:
    return stream_of(identity_proof(sigma, gamma, a, delta), engine=engine).node


def _contract_left(a: Formula, x: Node) -> Node:
    if isinstance(a, Var):
        return ac_node(Side.LEFT, a, x)
    from .cutelim import re_node

    s = x.sequent
    sigma_id = identity_node(x.engine, s.sigma, s.gamma.minus([a, a]), a, s.delta)
    return re_node(a, sigma_id, x)


def _contract_right(a: Formula, x: Node) -> Node:
    if isinstance(a, Var):
        return ac_node(Side.RIGHT, a, x)
    from .cutelim import re_node

    s = x.sequent
    sigma_id = identity_node(x.engine, s.sigma, s.gamma, a, s.delta.minus([a, a]))
    return re_node(a, x, sigma_id)


def ctr_node(phi: Multiset, psi: Multiset, x: Node) -> Node:
    """Drop repeated copies of ``phi`` (left) and ``psi`` (right)."""
    s = x.sequent
    if not phi.issubset(s.gamma) or not psi.issubset(s.delta):
        raise ShapeError("the multisets to contract are not part of the endsequent")
    for f, n in phi.items:
        for _ in range(n - 1):
            x = _contract_left(f, x)
    for f, n in psi.items:
        for _ in range(n - 1):
            x = _contract_right(f, x)
    return x


# -- identity proofs -------------------------------------------------------------


def identity_proof(sigma: Iterable[Formula], gamma, a: Formula, delta) -> CyclicProof:
    """A slim cut-free proof of ``sigma; gamma, a => a, delta``."""
    return _identity_proof(frozenset(sigma), _ms(gamma), a, _ms(delta))


@lru_cache(maxsize=4096)
def _identity_proof(sigma: frozenset, gamma: Multiset, a: Formula, delta: Multiset) -> CyclicProof:
    b = ProofBuilder(sigma)
    root = _identity(b, sigma, gamma, a, delta)
    return b.build(root)


def _identity(b: ProofBuilder, sigma, gamma: Multiset, a: Formula, delta: Multiset) -> int:
    seq = Sequent(sigma, gamma + [a], delta + [a])
    match a:
        case Var():
            return b.add(Rule("axp", seq))
        case Bot():
            return b.add(Rule("axbot", seq))
        case Imp(left, right):
            nid = b.reserve()
            inner = b.reserve()
            keep = b.put(
                inner,
                Rule("impl", Sequent(sigma, gamma + [a, left], delta + [right]), principal=a),
                [
                    _identity(b, sigma, gamma + [left], right, delta),
                    _identity(b, sigma, gamma, left, delta + [right]),
                ],
            )
            return b.put(nid, Rule("impr", seq, principal=a), [keep])
        case Box(body):
            premise = _identity(b, sigma, EMPTY, body, EMPTY)
            return b.put(
                b.reserve(), Rule("box", seq, principal=a, lam=Multiset([body])), [premise]
            )
        case BoxPlus(body):
            pi = Multiset([body])
            nid = b.reserve()
            left = _identity(b, sigma, Multiset([a]), body, EMPTY)
            core = Sequent(sigma, [body, a], [a])
            if seq == core:
                right = b.link(core, nid)
            else:
                right = b.reserve()
                b.put(
                    right,
                    Rule("boxplus", core, principal=a, pi=pi),
                    [_identity(b, sigma, Multiset([a]), body, EMPTY), b.link(core, right)],
                )
            return b.put(nid, Rule("boxplus", seq, principal=a, pi=pi), [left, right])
    raise TypeError(f"not a formula: {a!r}")


# -- public wrappers -------------------------------------------------------------

ProofLike = Union[ProofStream, CyclicProof]


def _ms(x) -> Multiset:
    return x if isinstance(x, Multiset) else Multiset(x)


def _reannotate(node: Node, ann: Annotation) -> ProofStream:
    if any(ann is c for c in annotation_candidates(node.sequent)):
        return ProofStream(node, ann)
    return ProofStream(node, CIRCLE)


def apply_to(p: ProofLike, op, fuel: Fuel | int | None = None) -> ProofLike:
    """Run a node transformation on a stream, or on a cyclic proof via its unfolding."""
    if isinstance(p, ProofStream):
        return _reannotate(op(p.node), p.ann)
    if isinstance(p, CyclicProof):
        verdict = check_proof(p)
        ann = verdict.root_annotation if verdict else CIRCLE
        s = stream_of(p, ann)
        return regularize(_reannotate(op(s.node), ann), fuel)
    raise TypeError(f"expected a proof stream or a cyclic proof, not {type(p).__name__}")


def weaken(phi, psi, p: ProofLike, fuel: Fuel | int | None = None) -> ProofLike:
    phi, psi = _ms(phi), _ms(psi)
    return apply_to(p, lambda n: wk_node(phi, psi, n), fuel)


def invert(kind: InversionKind, p: ProofLike, fuel: Fuel | int | None = None) -> ProofLike:
    return apply_to(p, lambda n: inv_node(kind, n), fuel)


def atomic_contract(side: Side | str, v: Var, p: ProofLike, fuel: Fuel | int | None = None) -> ProofLike:
    side = Side(side)
    return apply_to(p, lambda n: ac_node(side, v, n), fuel)


def contract(phi, psi, p: ProofLike, fuel: Fuel | int | None = None) -> ProofLike:
    phi, psi = _ms(phi), _ms(psi)
    return apply_to(p, lambda n: ctr_node(phi, psi, n), fuel)


sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))
