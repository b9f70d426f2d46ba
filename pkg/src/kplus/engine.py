"""Lazy infinite proofs, fuel accounting and regularization.

A :class:`Node` denotes a possibly infinite, unannotated proof tree.  Its
conclusion is known eagerly; its last rule and premise nodes are produced on
demand by forcing.  Nodes made by transformations are hash-consed inside an
:class:`Engine`: the table key is the operation tag, its parameters and the
argument *nodes* (compared by identity), so two handles with the same key
denote the same tree because every operation is deterministic.

:class:`ProofStream` pairs a node with an annotation and is the public view.
:func:`regularize` walks a stream depth first and folds it back into a
finite cyclic proof.
"""

from __future__ import annotations

import os
from contextlib import contextmanager
from contextvars import ContextVar
from dataclasses import dataclass
from typing import Callable, Union

from .proof import (
    BackLink,
    CyclicProof,
    ProofBuilder,
    Rule,
    premise_annotations,
    stays_in_class,
)
from .sequent import (
    CIRCLE,
    Annotation,
    AnnotatedSequent,
    AnnotationError,
    Sequent,
    annotation_candidates,
    print_annotation,
)

__all__ = [
    "DEFAULT_FUEL",
    "Fuel",
    "FuelExhausted",
    "NonProductive",
    "Engine",
    "Node",
    "Step",
    "ProofStream",
    "fuel_scope",
    "default_fuel",
    "stream_of",
    "regularize",
]

DEFAULT_FUEL = 1_000_000

# How often an annotated sequent may recur at right premises within one class
# run, under different handles, before regularize links by sequent alone.
DEFAULT_UNROLL = 4


def default_fuel() -> int:
    """The default budget, overridable through the KPLUS_FUEL variable."""
    raw = os.environ.get("KPLUS_FUEL")
    return int(raw) if raw else DEFAULT_FUEL


class FuelExhausted(RuntimeError):
    def __init__(self, tag: str, sequent: Sequent | None):
        self.tag = tag
        self.sequent = sequent
        where = f" at {sequent}" if sequent is not None else ""
        super().__init__(f"fuel exhausted while forcing {tag}{where}")


class NonProductive(RuntimeError):
    """Forcing a node required forcing that same node."""


class Fuel:
    def __init__(self, budget: int | None = None):
        self.budget = default_fuel() if budget is None else budget
        self.spent = 0

    def charge(self, tag: str, sequent: Sequent | None) -> None:
        if self.spent >= self.budget:
            raise FuelExhausted(tag, sequent)
        self.spent += 1

    @property
    def remaining(self) -> int:
        return self.budget - self.spent


_FUEL: ContextVar[Fuel | None] = ContextVar("kplus_fuel", default=None)


@contextmanager
def fuel_scope(fuel: Fuel | int | None = None):
    """Install a fuel budget for the forcing done inside the block."""
    if not isinstance(fuel, Fuel):
        fuel = Fuel(fuel)
    token = _FUEL.set(fuel)
    try:
        yield fuel
    finally:
        _FUEL.reset(token)


def _charge(tag: str, sequent: Sequent) -> None:
    fuel = _FUEL.get()
    if fuel is None:
        fuel = Fuel()
        _FUEL.set(fuel)
    fuel.charge(tag, sequent)


@dataclass(frozen=True)
class Step:
    """A forced node: its last rule and premise nodes."""

    rule: Rule
    premises: tuple


Compute = Callable[[], Union[Step, "Node"]]


class Node:
    """Handle on a lazily defined proof of ``sequent``.

    ``compute`` returns either a :class:`Step` or another node that this one
    is an alias of.  ``free`` nodes (unfoldings of cyclic proofs) cost no fuel.
    """

    __slots__ = ("sequent", "key", "engine", "free", "_compute", "_step", "_target", "_busy")

    def __init__(self, engine: Engine, key: tuple, sequent: Sequent, compute: Compute, free=False):
        self.engine = engine
        self.key = key
        self.sequent = sequent
        self.free = free
        self._compute = compute
        self._step: Step | None = None
        self._target: Node | None = None
        self._busy = False

    @property
    def forced(self) -> bool:
        return self._step is not None

    def force(self) -> Step:
        if self._step is not None:
            return self._step
        if self._busy:
            raise NonProductive(f"{self.tag} at {self.sequent} depends on itself")
        if not self.free:
            _charge(self.tag, self.sequent)
        self._busy = True
        try:
            result = self._compute()
            if isinstance(result, Node):
                step = result.force()
                target = result.target()
            else:
                step, target = result, self
        finally:
            self._busy = False
        if step.rule.conclusion != self.sequent:
            raise AssertionError(
                f"{self.tag} produced {step.rule.conclusion} instead of {self.sequent}"
            )
        self._step = step
        self._target = target
        self._compute = None
        return step

    @property
    def tag(self) -> str:
        return self.key[0]

    def target(self) -> Node:
        """The node at the end of the alias chain (forces this node)."""
        self.force()
        return self._target

    def __repr__(self) -> str:
        state = "forced" if self._step is not None else "thunk"
        return f"<Node {self.tag} {state} {self.sequent}>"


class Engine:
    """Hash-consing table for nodes built by transformations."""

    def __init__(self):
        self.table: dict[tuple, Node] = {}

    def node(self, key: tuple, sequent: Sequent, compute: Compute, free: bool = False) -> Node:
        found = self.table.get(key)
        if found is None:
            found = Node(self, key, sequent, compute, free)
            self.table[key] = found
        return found


def _node_of(proof: CyclicProof, nid: int, engine: Engine) -> Node:
    nid = proof.resolve(nid)
    key = ("cyclic", id(proof), nid)

    def compute() -> Step:
        node = proof.nodes[nid]
        return Step(node.rule, tuple(_node_of(proof, c, engine) for c in node.premises))

    made = engine.node(key, proof.nodes[nid].conclusion, compute, free=True)
    # Keep the proof alive for as long as the table refers to it by id.
    engine.table.setdefault(("proof", id(proof)), proof)
    return made


class ProofStream:
    """An annotated lazy proof."""

    __slots__ = ("node", "ann")

    def __init__(self, node: Node, ann: Annotation = CIRCLE):
        if not any(ann is c for c in annotation_candidates(node.sequent)):
            raise AnnotationError(f"{print_annotation(ann)} is not an annotation of {node.sequent}")
        self.node = node
        self.ann = ann

    @property
    def sequent(self) -> Sequent:
        return self.node.sequent

    @property
    def annotated_sequent(self) -> AnnotatedSequent:
        return AnnotatedSequent(self.node.sequent, self.ann)

    @property
    def engine(self) -> Engine:
        return self.node.engine

    def head(self) -> Rule:
        return self.node.force().rule

    def premises(self) -> list[ProofStream]:
        step = self.node.force()
        anns = premise_annotations(step.rule, self.ann)
        return [ProofStream(n, a) for n, a in zip(step.premises, anns)]

    def __repr__(self) -> str:
        return f"<ProofStream {self.node!r} ann={self.ann}>"


def stream_of(p: CyclicProof, root_ann: Annotation = CIRCLE, engine: Engine | None = None) -> ProofStream:
    """The annotated unfolding of a cyclic proof."""
    engine = engine or Engine()
    return ProofStream(_node_of(p, p.root, engine), root_ann)


class _Frame:
    __slots__ = ("nid", "node", "ann", "parent", "run", "right", "children")

    def __init__(self, nid, node, ann, parent, run, right):
        self.nid = nid
        self.node = node
        self.ann = ann
        self.parent = parent
        self.run = run
        self.right = right
        self.children: list[int] = []


def regularize(
    s: ProofStream,
    fuel: Fuel | int | None = None,
    unroll: int = DEFAULT_UNROLL,
) -> CyclicProof:
    """Fold a stream into a finite cyclic proof.

    The walk is depth first.  A class run is a maximal stretch of the current
    branch whose edges keep the annotation class.  At a right premise of [+]
    the walk emits a back-link to the nearest right premise above it in the
    same run that is the same handle; failing that, once the same annotated
    sequent has already occurred ``unroll`` times there, to the nearest one
    with that sequent.  The first rule keeps the result bisimilar to the
    input; the second guarantees termination on slim cut-free streams, whose
    sequents range over a finite set.  Every emitted node also costs one
    unit of fuel, so non-terminating walks end in FuelExhausted.
    """
    scope = fuel_scope(fuel) if fuel is not None or _FUEL.get() is None else _nullscope()
    with scope:
        return _regularize(s, unroll)


@contextmanager
def _nullscope():
    yield _FUEL.get()


def _regularize(s: ProofStream, unroll: int) -> CyclicProof:
    sigma = s.sequent.sigma
    builder = ProofBuilder(sigma)
    runs = 0
    root = _Frame(builder.reserve(), s.node, s.ann, None, runs, False)
    stack: list[tuple[_Frame, bool]] = [(root, False)]
    while stack:
        frame, finishing = stack.pop()
        if finishing:
            builder.put(frame.nid, frame.node.force().rule, frame.children)
            continue
        _charge("regularize", frame.node.sequent)
        step = frame.node.force()
        frame.node = frame.node.target()
        if frame.right:
            target = _link_target(frame, unroll)
            if target is not None:
                builder.nodes[frame.nid] = BackLink(frame.node.sequent, target.nid)
                continue
        stack.append((frame, True))
        kids = []
        for i, (child, ann) in enumerate(zip(step.premises, premise_annotations(step.rule, frame.ann))):
            keep = stays_in_class(step.rule, i, frame.ann)
            if keep:
                run = frame.run
            else:
                runs += 1
                run = runs
            right = step.rule.kind == "boxplus" and i == 1
            kid = _Frame(builder.reserve(), child, ann, frame, run, right)
            frame.children.append(kid.nid)
            kids.append(kid)
        stack.extend((kid, False) for kid in reversed(kids))
    return builder.build(root.nid)


def _link_target(frame: _Frame, unroll: int) -> _Frame | None:
    same_sequent: list[_Frame] = []
    up = frame.parent
    while up is not None and up.run == frame.run:
        if up.right:
            if up.node is frame.node:
                return up
            if up.node.sequent == frame.node.sequent:
                same_sequent.append(up)
        up = up.parent
    if len(same_sequent) >= unroll:
        return same_sequent[0]
    return None
