"""Rule instances, cyclic proofs and their checker.

A cyclic proof is a finite tree of rule instances whose leaves are axioms or
back-links to ancestors.  Its meaning is the infinite unfolding obtained by
replacing every back-link leaf with a copy of the subtree at its target.

Modal rule instances store their decomposition (``sigma0``, ``lam``, ``pi``)
explicitly: the conclusion's antecedent is ``Phi + []lam + [+]pi`` and its
succedent ``principal + Psi``; the premise antecedent is
``sigma0 + lam + pi + [+]pi``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator, Union

from .formula import (
    BOT,
    Box,
    BoxPlus,
    Formula,
    Imp,
    ParseError,
    Var,
    canonical_sorted,
    parse_formula,
    print_formula,
)
from .sequent import (
    CIRCLE,
    EMPTY,
    Annotation,
    AnnotationError,
    Multiset,
    Sequent,
    annotation_candidates,
    parse_goal,
    print_annotation,
    print_goal,
)

AXIOM_KINDS = frozenset({"axp", "axbot"})
MODAL_KINDS = frozenset({"box", "boxplus"})
RULE_KINDS = frozenset({"axp", "axbot", "impl", "impr", "box", "boxplus", "cut"})


class RuleShapeError(ValueError):
    """A rule instance whose conclusion does not decompose as declared."""


@dataclass(frozen=True)
class Rule:
    """One inference step without its premises (a rule head)."""

    kind: str
    conclusion: Sequent
    principal: Formula | None = None
    sigma0: frozenset = frozenset()
    lam: Multiset = EMPTY
    pi: Multiset = EMPTY
    cut_formula: Formula | None = None

    @property
    def is_modal(self) -> bool:
        return self.kind in MODAL_KINDS

    @property
    def is_axiom(self) -> bool:
        return self.kind in AXIOM_KINDS

    @property
    def arity(self) -> int:
        return {"axp": 0, "axbot": 0, "impr": 1, "box": 1}.get(self.kind, 2)

    def is_slim(self) -> bool:
        return not (self.is_modal and (self.lam.has_repetitions() or self.pi.has_repetitions()))


def axiom(conclusion: Sequent) -> Rule:
    """The axiom rule closing an initial sequent (falsum preferred)."""
    if BOT in conclusion.gamma:
        return Rule("axbot", conclusion)
    if conclusion.is_initial():
        return Rule("axp", conclusion)
    raise RuleShapeError(f"not an initial sequent: {conclusion}")


def boxed(lam: Multiset) -> Multiset:
    return lam.map(Box)


def boxplussed(pi: Multiset) -> Multiset:
    return pi.map(BoxPlus)


def modal_premise_gamma(sigma0: Iterable[Formula], lam: Multiset, pi: Multiset) -> Multiset:
    return Multiset(sigma0) + lam + pi + boxplussed(pi)


@lru_cache(maxsize=1 << 16)
def side_contexts(rule: Rule) -> tuple[Multiset, Multiset]:
    """``(Phi, Psi)`` of a modal rule: the context around its boxed zones."""
    try:
        phi = rule.conclusion.gamma.minus(boxed(rule.lam) + boxplussed(rule.pi))
        psi = rule.conclusion.delta.minus([rule.principal])
    except ValueError as exc:
        raise RuleShapeError(str(exc)) from None
    return phi, psi


@lru_cache(maxsize=1 << 16)
def premise_sequents(rule: Rule) -> tuple[Sequent, ...]:
    """The premises a rule instance demands, or RuleShapeError."""
    c = rule.conclusion
    sigma = c.sigma
    kind = rule.kind
    try:
        if kind == "axp":
            if not any(isinstance(f, Var) and f in c.delta for f in c.gamma.distinct()):
                raise RuleShapeError("no variable shared by both sides")
            return ()
        if kind == "axbot":
            if BOT not in c.gamma:
                raise RuleShapeError("falsum is not on the left")
            return ()
        if kind == "impl":
            a = rule.principal
            if not isinstance(a, Imp):
                raise RuleShapeError("principal of impl must be an implication")
            rest = c.gamma.minus([a])
            return (
                Sequent(sigma, rest + [a.right], c.delta),
                Sequent(sigma, rest, c.delta + [a.left]),
            )
        if kind == "impr":
            a = rule.principal
            if not isinstance(a, Imp):
                raise RuleShapeError("principal of impr must be an implication")
            rest = c.delta.minus([a])
            return (Sequent(sigma, c.gamma + [a.left], rest + [a.right]),)
        if kind in MODAL_KINDS:
            a = rule.principal
            want = Box if kind == "box" else BoxPlus
            if not isinstance(a, want):
                raise RuleShapeError(f"principal of {kind} must be a {want.__name__} formula")
            if not rule.sigma0 <= sigma:
                raise RuleShapeError("sigma0 is not a subset of sigma")
            side_contexts(rule)
            gamma = modal_premise_gamma(rule.sigma0, rule.lam, rule.pi)
            if kind == "box":
                return (Sequent(sigma, gamma, [a.body]),)
            return (Sequent(sigma, gamma, [a.body]), Sequent(sigma, gamma, [a]))
        if kind == "cut":
            a = rule.cut_formula
            if a is None:
                raise RuleShapeError("cut without a cut formula")
            return (Sequent(sigma, c.gamma, c.delta + [a]), Sequent(sigma, c.gamma + [a], c.delta))
    except ValueError as exc:
        if isinstance(exc, RuleShapeError):
            raise
        raise RuleShapeError(str(exc)) from None
    raise RuleShapeError(f"unknown rule kind {kind!r}")


def premise_annotations(rule: Rule, ann: Annotation) -> tuple[Annotation, ...]:
    """Annotation propagation from a conclusion to its premises."""
    if rule.kind in ("impl", "impr", "cut"):
        return (ann,) * rule.arity
    if rule.kind == "box":
        return (CIRCLE,)
    if rule.kind == "boxplus":
        return (CIRCLE, rule.principal.body)
    return ()


def stays_in_class(rule: Rule, index: int, ann: Annotation) -> bool:
    """Whether the premise edge ``index`` keeps the same class."""
    if rule.kind in ("impl", "impr", "cut"):
        return True
    return rule.kind == "boxplus" and index == 1 and ann is rule.principal.body


# -- cyclic proofs -------------------------------------------------------------


@dataclass(frozen=True)
class Inference:
    rule: Rule
    premises: tuple[int, ...]

    @property
    def conclusion(self) -> Sequent:
        return self.rule.conclusion


@dataclass(frozen=True)
class BackLink:
    conclusion: Sequent
    target: int


ProofNode = Union[Inference, BackLink]


@dataclass(frozen=True, eq=False)
class CyclicProof:
    """A finite rule tree with back-link leaves."""

    sigma: frozenset
    nodes: dict
    root: int
    _parents: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "sigma", frozenset(self.sigma))
        parents: dict[int, int] = {}
        for nid, node in self.nodes.items():
            if isinstance(node, Inference):
                for child in node.premises:
                    parents.setdefault(child, nid)
        object.__setattr__(self, "_parents", parents)

    @property
    def endsequent(self) -> Sequent:
        return self.nodes[self.root].conclusion

    def parent(self, nid: int) -> int | None:
        return self._parents.get(nid)

    def resolve(self, nid: int) -> int:
        """Follow a back-link to its target."""
        node = self.nodes[nid]
        return node.target if isinstance(node, BackLink) else nid

    def preorder(self) -> Iterator[int]:
        stack = [self.root]
        while stack:
            nid = stack.pop()
            yield nid
            node = self.nodes[nid]
            if isinstance(node, Inference):
                stack.extend(reversed(node.premises))

    def inferences(self) -> Iterator[Inference]:
        for node in self.nodes.values():
            if isinstance(node, Inference):
                yield node

    def node_count(self) -> int:
        return sum(1 for _ in self.inferences())

    def backlink_count(self) -> int:
        return sum(1 for n in self.nodes.values() if isinstance(n, BackLink))

    def is_cut_free(self) -> bool:
        return all(n.rule.kind != "cut" for n in self.inferences())

    def is_slim(self) -> bool:
        return all(n.rule.is_slim() for n in self.inferences())

    def renumbered(self) -> CyclicProof:
        """Copy with ids reassigned in pre-order from 0, dropping unreachable nodes."""
        order = {nid: i for i, nid in enumerate(self.preorder())}
        nodes: dict[int, ProofNode] = {}
        for old, new in order.items():
            node = self.nodes[old]
            if isinstance(node, Inference):
                nodes[new] = Inference(node.rule, tuple(order[c] for c in node.premises))
            else:
                nodes[new] = BackLink(node.conclusion, order[node.target])
        return CyclicProof(self.sigma, nodes, 0)


class ProofBuilder:
    """Incremental construction of a cyclic proof with pre-allocated ids."""

    def __init__(self, sigma: Iterable[Formula] = ()):
        self.sigma = frozenset(sigma)
        self.nodes: dict[int, ProofNode] = {}
        self._next = 0

    def reserve(self) -> int:
        nid = self._next
        self._next += 1
        return nid

    def put(self, nid: int, rule: Rule, premises: Iterable[int] = ()) -> int:
        self.nodes[nid] = Inference(rule, tuple(premises))
        return nid

    def add(self, rule: Rule, premises: Iterable[int] = ()) -> int:
        return self.put(self.reserve(), rule, premises)

    def link(self, conclusion: Sequent, target: int) -> int:
        nid = self.reserve()
        self.nodes[nid] = BackLink(conclusion, target)
        return nid

    def graft(self, proof: CyclicProof) -> int:
        """Copy ``proof`` in as a subtree; returns the id of its root."""
        mapping = {old: self.reserve() for old in proof.preorder()}
        for old, new in mapping.items():
            node = proof.nodes[old]
            if isinstance(node, Inference):
                self.nodes[new] = Inference(node.rule, tuple(mapping[c] for c in node.premises))
            else:
                self.nodes[new] = BackLink(node.conclusion, mapping[node.target])
        return mapping[proof.root]

    def build(self, root: int) -> CyclicProof:
        return CyclicProof(self.sigma, dict(self.nodes), root).renumbered()


# -- checking ------------------------------------------------------------------


@dataclass(frozen=True)
class Valid:
    """A successful check; ``annotations`` maps node ids to annotations."""

    annotations: dict
    root_annotation: Annotation = CIRCLE

    def __bool__(self) -> bool:
        return True


@dataclass(frozen=True)
class Invalid:
    reason: str
    node: int
    detail: str = ""

    def __bool__(self) -> bool:
        return False


def _check_structure(p: CyclicProof) -> Invalid | None:
    if p.root not in p.nodes:
        return Invalid("BadRuleShape", p.root, "root id is not a node")
    seen: set[int] = set()
    ancestors: list[int] = []
    # Iterative DFS keeping the ancestor chain for back-link targets.
    stack: list[tuple[int, bool]] = [(p.root, False)]
    while stack:
        nid, leaving = stack.pop()
        if leaving:
            ancestors.pop()
            continue
        if nid in seen:
            return Invalid("BadRuleShape", nid, "node is reachable twice; not a tree")
        seen.add(nid)
        node = p.nodes.get(nid)
        if node is None:
            return Invalid("BadRuleShape", ancestors[-1] if ancestors else nid, f"missing node {nid}")
        if node.conclusion.sigma != p.sigma:
            return Invalid("BadRuleShape", nid, "sequent sigma differs from the ambient sigma")
        if isinstance(node, BackLink):
            if node.target not in ancestors:
                return Invalid("DanglingBackLink", nid, "target is not a proper ancestor")
            if p.nodes[node.target].conclusion != node.conclusion:
                return Invalid("DanglingBackLink", nid, "target proves a different sequent")
            continue
        rule = node.rule
        try:
            expected = premise_sequents(rule)
        except RuleShapeError as exc:
            kind = "BadAxiom" if rule.is_axiom else "BadRuleShape"
            return Invalid(kind, nid, str(exc))
        if len(expected) != len(node.premises):
            return Invalid("BadRuleShape", nid, "wrong number of premises")
        for child, want in zip(node.premises, expected):
            other = p.nodes.get(child)
            if other is None:
                return Invalid("BadRuleShape", nid, f"missing premise node {child}")
            if other.conclusion != want:
                return Invalid("BadRuleShape", child, f"expected premise {print_goal(want)}")
        ancestors.append(nid)
        stack.append((nid, True))
        stack.extend((c, False) for c in reversed(node.premises))
    if len(seen) != len(p.nodes):
        stray = min(set(p.nodes) - seen)
        return Invalid("BadRuleShape", stray, "node is unreachable from the root")
    return None


def infer_annotations(p: CyclicProof, root_ann: Annotation) -> dict[int, Annotation]:
    """Top-down annotation propagation over the tree (back-links are leaves)."""
    if not any(root_ann is c for c in annotation_candidates(p.endsequent)):
        raise AnnotationError(f"{print_annotation(root_ann)} is not an annotation of the root")
    ann: dict[int, Annotation] = {p.root: root_ann}
    for nid in p.preorder():
        node = p.nodes[nid]
        if isinstance(node, Inference):
            for child, a in zip(node.premises, premise_annotations(node.rule, ann[nid])):
                ann[child] = a
    return ann


def _path_to(p: CyclicProof, ancestor: int, leaf: int) -> list[int]:
    """Tree path from ``ancestor`` down to ``leaf``, both included."""
    path = [leaf]
    while path[-1] != ancestor:
        path.append(p.parent(path[-1]))
    path.reverse()
    return path


def _is_right_premise(p: CyclicProof, nid: int) -> bool:
    parent = p.parent(nid)
    if parent is None:
        return False
    node = p.nodes[parent]
    return node.rule.kind == "boxplus" and node.premises[1] == nid


def _check_links_tree(p: CyclicProof, ann: dict[int, Annotation]) -> Invalid | None:
    """Back-link conditions with the tree annotation."""
    for nid in sorted(p.nodes):
        node = p.nodes[nid]
        if not isinstance(node, BackLink):
            continue
        path = _path_to(p, node.target, nid)
        if not any(_is_right_premise(p, m) for m in path[1:]):
            return Invalid("NoBoxPlusRightOnPath", nid, "the cycle crosses no right premise of [+]")
        if any(ann[m] is not ann[nid] for m in path):
            return Invalid("AnnotationMismatchOnPath", nid, "annotation changes along the cycle")
    return None


def _check_unfolding(p: CyclicProof, root_ann: Annotation) -> Invalid | None:
    """Exact trace condition on the annotated unfolding.

    States are pairs (node, annotation); a back-link leaf reached with
    annotation ``a`` continues at its target with ``a``.  The unfolding is
    valid iff inside every strongly connected part all edges keep the
    annotation (and the class) and every cycle crosses a right premise.
    """
    start = (p.root, root_ann)
    edges: dict[tuple, list[tuple[tuple, str]]] = {}
    link_of: dict[tuple, int] = {}
    todo = [start]
    while todo:
        state = todo.pop()
        if state in edges:
            continue
        nid, a = state
        node = p.nodes[nid]
        out: list[tuple[tuple, str]] = []
        if isinstance(node, Inference):
            rule = node.rule
            for i, (child, ca) in enumerate(zip(node.premises, premise_annotations(rule, a))):
                cnode = p.nodes[child]
                label = "keep" if stays_in_class(rule, i, a) else "break"
                if rule.kind == "boxplus" and i == 1 and label == "keep":
                    label = "right"
                if isinstance(cnode, BackLink):
                    succ = (cnode.target, ca)
                    link_of.setdefault((succ, state), child)
                else:
                    succ = (child, ca)
                out.append((succ, label))
                todo.append(succ)
        edges[state] = out

    for component in _strong_components(edges):
        inner = [
            (u, v, lab) for u in component for v, lab in edges[u] if v in component
        ]
        if not inner:
            continue
        culprit = min(
            (link_of[(v, u)] for u, v, _ in inner if (v, u) in link_of), default=min(s[0] for s in component)
        )
        if any(lab == "break" for _, _, lab in inner):
            return Invalid("AnnotationMismatchOnPath", culprit, "a cycle changes annotation")
        plain = {u: [v for v, lab in edges[u] if v in component and lab == "keep"] for u in component}
        if _has_cycle(plain):
            return Invalid("NoBoxPlusRightOnPath", culprit, "a cycle crosses no right premise of [+]")
    return None


def _strong_components(edges: dict) -> list[set]:
    """Tarjan's algorithm, iterative."""
    index: dict = {}
    low: dict = {}
    on_stack: set = set()
    stack: list = []
    result: list[set] = []
    counter = 0
    for root in edges:
        if root in index:
            continue
        work = [(root, iter(edges[root]))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w, _ in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(edges[w])))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
            if low[v] == index[v]:
                comp = set()
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.add(w)
                    if w == v:
                        break
                result.append(comp)
    return result


def _has_cycle(graph: dict) -> bool:
    colour: dict = {}
    for root in graph:
        if root in colour:
            continue
        colour[root] = 1
        work = [(root, iter(graph[root]))]
        while work:
            v, it = work[-1]
            nxt = next(it, None)
            if nxt is None:
                colour[v] = 2
                work.pop()
            elif colour.get(nxt) == 1:
                return True
            elif nxt not in colour:
                colour[nxt] = 1
                work.append((nxt, iter(graph[nxt])))
    return False


def _check_with(p: CyclicProof, root_ann: Annotation, exact: bool) -> Valid | Invalid:
    try:
        ann = infer_annotations(p, root_ann)
    except AnnotationError as exc:
        return Invalid("AnnotationError", p.root, str(exc))
    problem = _check_links_tree(p, ann)
    if problem is not None and exact and problem.reason == "AnnotationMismatchOnPath":
        problem = _check_unfolding(p, root_ann)
    if problem is not None:
        return problem
    return Valid(ann, root_ann)


def check_proof(p: CyclicProof, root_ann: Annotation | str = "auto") -> Valid | Invalid:
    """Check local rule shapes, axioms, back-links and the trace condition.

    With an explicit annotation the proof is accepted when its annotated
    unfolding is valid.  With ``"auto"`` the candidates (circle first, then
    formulas in canonical order) are tried first against the stricter
    condition that every back-link joins equally annotated nodes, and only
    then against the unfolding condition.
    """
    problem = _check_structure(p)
    if problem is not None:
        return problem
    if root_ann != "auto":
        return _check_with(p, root_ann, exact=True)
    candidates = annotation_candidates(p.endsequent)
    first: Invalid | None = None
    for exact in (False, True):
        for cand in candidates:
            verdict = _check_with(p, cand, exact)
            if verdict:
                return verdict
            if first is None:
                first = verdict
    return first


# -- metrics -------------------------------------------------------------------


def local_height(p: CyclicProof) -> int:
    """Height of the tree truncated at the first modal premises."""
    memo: dict[int, int] = {}
    in_progress: set[int] = set()

    def height(nid: int) -> int:
        nid = p.resolve(nid)
        if nid in memo:
            return memo[nid]
        node = p.nodes[nid]
        if node.rule.is_axiom or node.rule.is_modal or nid in in_progress:
            return 0
        in_progress.add(nid)
        value = 1 + max(height(c) for c in node.premises)
        in_progress.discard(nid)
        memo[nid] = value
        return value

    return height(p.root)


def class_partition(p: CyclicProof, root_ann: Annotation) -> dict[int, int]:
    """Class ids for the nodes; edges that keep the class join nodes."""
    ann = infer_annotations(p, root_ann)
    classes: dict[int, int] = {}
    fresh = 0
    for nid in p.preorder():
        if nid not in classes:
            classes[nid] = fresh
            fresh += 1
        node = p.nodes[nid]
        if isinstance(node, Inference):
            for i, child in enumerate(node.premises):
                if stays_in_class(node.rule, i, ann[nid]):
                    classes[child] = classes[nid]
    return classes


def proof_equal(p: CyclicProof, q: CyclicProof) -> bool:
    """Whether the infinite unfoldings of ``p`` and ``q`` are identical."""
    if p.sigma != q.sigma:
        return False
    assumed: set[tuple[int, int]] = set()
    todo = [(p.resolve(p.root), q.resolve(q.root))]
    while todo:
        pair = todo.pop()
        if pair in assumed:
            continue
        assumed.add(pair)
        a, b = p.nodes[pair[0]], q.nodes[pair[1]]
        if a.rule != b.rule:
            return False
        todo.extend(zip((p.resolve(c) for c in a.premises), (q.resolve(c) for c in b.premises)))
    return True


def fragment_equal(p: CyclicProof, q: CyclicProof, ann: Annotation, n: int) -> bool:
    """Compare the n-fragments of the annotated unfoldings.

    A right premise of [+] is cut off when the path from the root stays in
    the root class and crosses exactly ``n`` applications of [+] up to and
    including that one.  Outside the root class nothing is cut.
    """
    if n == 0:
        return True
    if p.sigma != q.sigma:
        return False
    assumed: set = set()
    todo = [(p.resolve(p.root), q.resolve(q.root), ann, True, 0)]
    while todo:
        state = todo.pop()
        if state in assumed:
            continue
        assumed.add(state)
        pid, qid, a, in_root, crossed = state
        x, y = p.nodes[pid], q.nodes[qid]
        if x.rule != y.rule:
            return False
        rule = x.rule
        for i, (pc, qc, ca) in enumerate(zip(x.premises, y.premises, premise_annotations(rule, a))):
            keep = in_root and stays_in_class(rule, i, a)
            count = crossed
            if keep and rule.kind == "boxplus":
                count += 1
                if count == n:
                    continue
            todo.append((p.resolve(pc), q.resolve(qc), ca, keep, count if keep else 0))
    return True


def n_fragment(p: CyclicProof, ann: Annotation, n: int, max_depth: int = 64):
    """The n-fragment as nested ``(rule, goal, annotation, children)`` tuples.

    A cut-off right premise appears as the string ``"cut"``.  For ``n == 0``
    the fragment is empty and ``None`` is returned.
    """
    if n == 0:
        return None

    def build(nid: int, a: Annotation, in_root: bool, crossed: int, depth: int):
        if depth > max_depth:
            raise RecursionError("fragment deeper than max_depth")
        nid = p.resolve(nid)
        rule = p.nodes[nid].rule
        children = []
        for i, (c, ca) in enumerate(zip(p.nodes[nid].premises, premise_annotations(rule, a))):
            keep = in_root and stays_in_class(rule, i, a)
            count = crossed + 1 if keep and rule.kind == "boxplus" else crossed
            if keep and rule.kind == "boxplus" and count == n:
                children.append("cut")
            else:
                children.append(build(c, ca, keep, count if keep else 0, depth + 1))
        return (rule.kind, print_goal(rule.conclusion), print_annotation(a), tuple(children))

    return build(p.root, ann, True, 0, 0)


# -- file format ---------------------------------------------------------------


class ProofFormatError(ValueError):
    pass


_FIELDS = {
    "axp": {"id", "rule", "goal"},
    "axbot": {"id", "rule", "goal"},
    "impl": {"id", "rule", "goal", "principal", "premises"},
    "impr": {"id", "rule", "goal", "principal", "premises"},
    "box": {"id", "rule", "goal", "principal", "sigma0", "lambda", "pi", "premises"},
    "boxplus": {"id", "rule", "goal", "principal", "sigma0", "lambda", "pi", "premises"},
    "cut": {"id", "rule", "goal", "cut_formula", "premises"},
    "backlink": {"id", "rule", "goal", "target"},
}
_TOP_FIELDS = {"version", "sigma", "root", "nodes"}


def _formulas(items) -> list[Formula]:
    if not isinstance(items, list):
        raise ProofFormatError("expected a list of formulas")
    return [parse_formula(s) for s in items]


def proof_from_json(data: dict) -> CyclicProof:
    if not isinstance(data, dict):
        raise ProofFormatError("a proof file holds a JSON object")
    unknown = set(data) - _TOP_FIELDS
    if unknown:
        raise ProofFormatError(f"unknown fields: {sorted(unknown)}")
    if data.get("version") != 1:
        raise ProofFormatError("unsupported version")
    sigma = frozenset(_formulas(data.get("sigma", [])))
    nodes: dict[int, ProofNode] = {}
    for raw in data.get("nodes", []):
        kind = raw.get("rule")
        if kind not in _FIELDS:
            raise ProofFormatError(f"unknown rule {kind!r}")
        unknown = set(raw) - _FIELDS[kind]
        if unknown:
            raise ProofFormatError(f"unknown fields for {kind}: {sorted(unknown)}")
        nid = raw["id"]
        if not isinstance(nid, int) or nid in nodes:
            raise ProofFormatError(f"bad or duplicate node id {nid!r}")
        goal = parse_goal(raw["goal"], sigma)
        if kind == "backlink":
            nodes[nid] = BackLink(goal, int(raw["target"]))
            continue
        rule = Rule(
            kind,
            goal,
            principal=parse_formula(raw["principal"]) if "principal" in raw else None,
            sigma0=frozenset(_formulas(raw.get("sigma0", []))),
            lam=Multiset(_formulas(raw.get("lambda", []))),
            pi=Multiset(_formulas(raw.get("pi", []))),
            cut_formula=parse_formula(raw["cut_formula"]) if "cut_formula" in raw else None,
        )
        nodes[nid] = Inference(rule, tuple(int(c) for c in raw.get("premises", [])))
    if "root" not in data:
        raise ProofFormatError("missing root")
    return CyclicProof(sigma, nodes, int(data["root"]))


def proof_to_json(p: CyclicProof) -> dict:
    def fl(fs) -> list[str]:
        return [print_formula(f) for f in fs]

    nodes = []
    for nid in sorted(p.nodes):
        node = p.nodes[nid]
        entry: dict = {"id": nid}
        if isinstance(node, BackLink):
            entry.update(rule="backlink", goal=print_goal(node.conclusion), target=node.target)
        else:
            rule = node.rule
            entry.update(rule=rule.kind, goal=print_goal(rule.conclusion))
            if rule.principal is not None:
                entry["principal"] = print_formula(rule.principal)
            if rule.is_modal:
                entry["sigma0"] = fl(canonical_sorted(rule.sigma0))
                entry["lambda"] = fl(rule.lam)
                entry["pi"] = fl(rule.pi)
            if rule.kind == "cut":
                entry["cut_formula"] = print_formula(rule.cut_formula)
            if node.premises:
                entry["premises"] = list(node.premises)
        nodes.append(entry)
    return {
        "version": 1,
        "sigma": fl(canonical_sorted(p.sigma)),
        "root": p.root,
        "nodes": nodes,
    }


def load_proof(text: str) -> CyclicProof:
    """Parse a proof file; raises ProofFormatError or ParseError."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProofFormatError(f"invalid JSON: {exc}") from None
    try:
        return proof_from_json(data)
    except (KeyError, TypeError) as exc:
        raise ProofFormatError(f"malformed node: {exc}") from None


def dump_proof(p: CyclicProof) -> str:
    return json.dumps(proof_to_json(p), indent=2) + "\n"


__all__ = [
    "Rule",
    "RuleShapeError",
    "Inference",
    "BackLink",
    "CyclicProof",
    "ProofBuilder",
    "Valid",
    "Invalid",
    "axiom",
    "premise_sequents",
    "premise_annotations",
    "side_contexts",
    "stays_in_class",
    "infer_annotations",
    "check_proof",
    "local_height",
    "class_partition",
    "proof_equal",
    "fragment_equal",
    "n_fragment",
    "ProofFormatError",
    "load_proof",
    "dump_proof",
    "proof_from_json",
    "proof_to_json",
    "ParseError",
]
