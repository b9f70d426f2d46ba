"""Hilbert-style derivations and their translations to and from cyclic proofs.

The axioms are the propositional tautologies (with box-rooted subformulas
read as atoms) and four modal schemas:

* ``ax2``: ``[](A -> B) -> ([]A -> []B)``
* ``ax3``: ``[+](A -> B) -> ([+]A -> [+]B)``
* ``ax4``: ``[+]A -> []A and [][+]A``
* ``ax5``: ``[]A and [+](A -> []A) -> [+]A``

The rules are modus ponens and necessitation (from ``A`` infer ``[+]A``).
An assumption leaf below a necessitation is *boxed* and must come from the
global set ``sigma``; the other assumption leaves must come from ``gamma``.

Derivations are immutable and may share subderivations (they form a DAG).
"""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass
from typing import Callable, Iterable

from .admissible import identity_proof, weaken
from .formula import (
    BOT,
    Bot,
    Box,
    BoxPlus,
    Formula,
    Imp,
    canonical_sorted,
    conj,
    conj_all,
    disj_all,
    neg,
    parse_formula,
    print_formula,
)
from .proof import (
    CyclicProof,
    ProofBuilder,
    Rule,
    axiom,
    check_proof,
    premise_annotations,
    stays_in_class,
)
from .sequent import CIRCLE, EMPTY, Annotation, Multiset, Sequent

__all__ = [
    "Derivation",
    "Taut",
    "Axiom",
    "Assume",
    "MP",
    "Nec",
    "AxiomII",
    "AxiomIII",
    "AxiomIV",
    "AxiomV",
    "ax2",
    "ax3",
    "ax4",
    "ax5",
    "TooManyAtoms",
    "MAX_ATOMS",
    "atoms",
    "is_tautology",
    "match_schema",
    "Valid",
    "Invalid",
    "check_derivation",
    "hilbert_to_sequent",
    "sequent_to_hilbert",
    "HilbertFormatError",
    "load_derivation",
    "dump_derivation",
    "derivation_from_json",
    "derivation_to_json",
]

MAX_ATOMS = 20
SCHEMAS = ("ax2", "ax3", "ax4", "ax5")


# -- derivations -----------------------------------------------------------------


class Derivation:
    """Base class; ``conclusion`` is None for a malformed modus ponens."""

    __slots__ = ("conclusion",)
    conclusion: Formula | None

    def children(self) -> tuple[Derivation, ...]:
        return ()


class Taut(Derivation):
    __slots__ = ("formula",)

    def __init__(self, formula: Formula):
        self.formula = formula
        self.conclusion = formula

    def __repr__(self) -> str:
        return f"Taut({print_formula(self.formula)})"


class Axiom(Derivation):
    """An instance of one of the modal schemas ``ax2`` .. ``ax5``."""

    __slots__ = ("schema", "formula")

    def __init__(self, schema: str, formula: Formula):
        if schema not in SCHEMAS:
            raise ValueError(f"unknown axiom schema {schema!r}")
        self.schema = schema
        self.formula = formula
        self.conclusion = formula

    def __repr__(self) -> str:
        return f"Axiom({self.schema}, {print_formula(self.formula)})"


class Assume(Derivation):
    __slots__ = ("formula",)

    def __init__(self, formula: Formula):
        self.formula = formula
        self.conclusion = formula

    def __repr__(self) -> str:
        return f"Assume({print_formula(self.formula)})"


class MP(Derivation):
    """From ``left: A`` and ``right: A -> B`` infer ``B``."""

    __slots__ = ("left", "right")

    def __init__(self, left: Derivation, right: Derivation):
        self.left = left
        self.right = right
        major = right.conclusion
        ok = isinstance(major, Imp) and left.conclusion is not None and major.left is left.conclusion
        self.conclusion = major.right if ok else None

    def children(self) -> tuple[Derivation, ...]:
        return (self.left, self.right)

    def __repr__(self) -> str:
        return f"MP({self.left!r}, {self.right!r})"


class Nec(Derivation):
    __slots__ = ("premise",)

    def __init__(self, premise: Derivation):
        self.premise = premise
        self.conclusion = BoxPlus(premise.conclusion) if premise.conclusion is not None else None

    def children(self) -> tuple[Derivation, ...]:
        return (self.premise,)

    def __repr__(self) -> str:
        return f"Nec({self.premise!r})"


def ax2(a: Formula, b: Formula) -> Formula:
    return Imp(Box(Imp(a, b)), Imp(Box(a), Box(b)))


def ax3(a: Formula, b: Formula) -> Formula:
    return Imp(BoxPlus(Imp(a, b)), Imp(BoxPlus(a), BoxPlus(b)))


def ax4(a: Formula) -> Formula:
    return Imp(BoxPlus(a), conj(Box(a), Box(BoxPlus(a))))


def ax5(a: Formula) -> Formula:
    return Imp(conj(Box(a), BoxPlus(Imp(a, Box(a)))), BoxPlus(a))


def AxiomII(a: Formula, b: Formula) -> Axiom:
    return Axiom("ax2", ax2(a, b))


def AxiomIII(a: Formula, b: Formula) -> Axiom:
    return Axiom("ax3", ax3(a, b))


def AxiomIV(a: Formula) -> Axiom:
    return Axiom("ax4", ax4(a))


def AxiomV(a: Formula) -> Axiom:
    return Axiom("ax5", ax5(a))


def _unconj(f: Formula) -> tuple[Formula, Formula] | None:
    match f:
        case Imp(Imp(x, Imp(y, Bot())), Bot()):
            return x, y
    return None


def match_schema(schema: str, f: Formula) -> tuple[Formula, ...] | None:
    """The parameters of ``f`` as an instance of ``schema``, or None."""
    match schema, f:
        case "ax2", Imp(Box(Imp(a, b)), Imp(Box(a2), Box(b2))) if a is a2 and b is b2:
            return (a, b)
        case "ax3", Imp(BoxPlus(Imp(a, b)), Imp(BoxPlus(a2), BoxPlus(b2))) if a is a2 and b is b2:
            return (a, b)
        case "ax4", Imp(BoxPlus(a), rest):
            return (a,) if rest is conj(Box(a), Box(BoxPlus(a))) else None
        case "ax5", Imp(lhs, BoxPlus(a)):
            return (a,) if lhs is conj(Box(a), BoxPlus(Imp(a, Box(a)))) else None
    return None


# -- tautologies -----------------------------------------------------------------


class TooManyAtoms(ValueError):
    def __init__(self, count: int):
        self.count = count
        super().__init__(f"{count} atoms exceed the limit of {MAX_ATOMS}")


def atoms(f: Formula) -> frozenset[Formula]:
    """Variables and maximal box-rooted subformulas; falsum is not an atom."""
    found: set[Formula] = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, Imp):
            stack.extend((g.left, g.right))
        elif not isinstance(g, Bot):
            found.add(g)
    return frozenset(found)


def is_tautology(f: Formula) -> bool:
    """Classical validity with box-rooted subformulas as opaque atoms."""
    count = len(atoms(f))
    if count > MAX_ATOMS:
        raise TooManyAtoms(count)
    return _provable(frozenset(), frozenset([f]), {})


def _provable(left: frozenset, right: frozenset, memo: dict) -> bool:
    """Invertible propositional sequent search over sets of formulas."""
    key = (left, right)
    if key in memo:
        return memo[key]
    if BOT in left or not left.isdisjoint(right):
        memo[key] = True
        return True
    for f in right:
        if isinstance(f, Imp):
            result = _provable(left | {f.left}, (right - {f}) | {f.right}, memo)
            memo[key] = result
            return result
    imps = [f for f in left if isinstance(f, Imp)]
    if not imps:
        memo[key] = False
        return False

    def quick(f: Imp) -> tuple:
        closes = f.left in left or f.right in right or f.right is BOT
        return (not closes, f.key)

    f = min(imps, key=quick)
    rest = left - {f}
    result = _provable(rest | {f.right}, right, memo) and _provable(rest, right | {f.left}, memo)
    memo[key] = result
    return result


# -- checking --------------------------------------------------------------------


@dataclass(frozen=True)
class Valid:
    conclusion: Formula

    def __bool__(self) -> bool:
        return True


@dataclass(frozen=True)
class Invalid:
    reason: str
    node: int
    detail: str = ""

    def __bool__(self) -> bool:
        return False


def _numbering(d: Derivation) -> dict[int, int]:
    """Pre-order ids of the distinct nodes of a derivation DAG."""
    order: dict[int, int] = {}
    stack = [d]
    while stack:
        node = stack.pop()
        if id(node) in order:
            continue
        order[id(node)] = len(order)
        stack.extend(reversed(node.children()))
    return order


def check_derivation(d: Derivation, sigma: Iterable[Formula] = (), gamma: Iterable[Formula] = ()) -> Valid | Invalid:
    sigma = frozenset(sigma)
    gamma = frozenset(gamma)
    ids = _numbering(d)
    seen: set[tuple[int, bool]] = set()
    stack = [(d, False)]
    while stack:
        node, boxed = stack.pop()
        if (id(node), boxed) in seen:
            continue
        seen.add((id(node), boxed))
        nid = ids[id(node)]
        if isinstance(node, Taut):
            try:
                ok = is_tautology(node.formula)
            except TooManyAtoms as exc:
                return Invalid("NotTautology", nid, str(exc))
            if not ok:
                return Invalid("NotTautology", nid, print_formula(node.formula))
        elif isinstance(node, Axiom):
            if match_schema(node.schema, node.formula) is None:
                return Invalid("SchemaMismatch", nid, f"not an instance of {node.schema}")
        elif isinstance(node, Assume):
            pool = sigma if boxed else gamma
            if node.formula not in pool:
                where = "sigma" if boxed else "gamma"
                return Invalid("BadAssumption", nid, f"{print_formula(node.formula)} is not in {where}")
        elif isinstance(node, MP):
            # A malformed premise is reported at its own node, not at every MP below it.
            if node.conclusion is None and node.left.conclusion is not None and node.right.conclusion is not None:
                return Invalid("BadMP", nid, "the major premise is not an implication from the minor one")
            stack.append((node.right, boxed))
            stack.append((node.left, boxed))
        elif isinstance(node, Nec):
            stack.append((node.premise, True))
        else:
            raise TypeError(f"not a derivation: {node!r}")
    return Valid(d.conclusion)


# -- derived-rule builders -------------------------------------------------------


def imp_chain(hyps: Iterable[Formula], target: Formula) -> Formula:
    """``h1 -> (h2 -> ... -> target)``."""
    result = target
    for h in reversed(list(hyps)):
        result = Imp(h, result)
    return result


def classical(ds: list[Derivation], target: Formula) -> Derivation:
    """Derive ``target`` from ``ds`` by one tautology and modus ponens steps."""
    result: Derivation = Taut(imp_chain([x.conclusion for x in ds], target))
    for x in ds:
        result = MP(x, result)
    return result


def box_intro(d: Derivation) -> Derivation:
    """From a derivation of ``X`` obtain one of ``[]X``."""
    x = d.conclusion
    return classical([Nec(d), AxiomIV(x)], Box(x))


def box_mono(items: list[Formula], target: Formula, d: Derivation) -> Derivation:
    """From ``i1 -> ... -> ik -> T`` obtain ``[]i1 -> ... -> []ik -> []T``."""
    acc = box_intro(d)  # [] of the whole chain
    done: list[Formula] = []
    for i, item in enumerate(items):
        rest = imp_chain(items[i + 1 :], target)
        k = AxiomII(item, rest)
        done.append(Box(item))
        acc = classical([acc, k], imp_chain(done, Box(rest)))
    return acc


def plus_mono(d: Derivation) -> Derivation:
    """From ``X -> Y`` obtain ``[+]X -> [+]Y``."""
    f = d.conclusion
    return MP(Nec(d), AxiomIII(f.left, f.right))


def adm(x: Formula, y: Formula, d: Derivation) -> Derivation:
    """From ``Y -> [](X and Y)`` obtain ``Y -> [+]X``."""
    k = conj(x, y)
    step = classical([d], Imp(k, Box(k)))
    into_plus = classical([Nec(step), AxiomV(k)], Imp(Box(k), BoxPlus(k)))
    project = plus_mono(Taut(Imp(k, x)))
    return classical([d, into_plus, project], Imp(y, BoxPlus(x)))


_UNFOLD: dict[Formula, Derivation] = {}


def unfold(b: Formula) -> Derivation:
    """``[](B and [+]B) -> [+]B``."""
    if b in _UNFOLD:
        return _UNFOLD[b]
    k = conj(b, BoxPlus(b))
    pair = box_mono([b, BoxPlus(b)], k, Taut(imp_chain([b, BoxPlus(b)], k)))
    step = classical([AxiomIV(b), pair], Imp(k, conj(b, Box(k))))
    lifted = box_mono([k], conj(b, Box(k)), step)
    result = adm(b, Box(k), lifted)
    _UNFOLD[b] = result
    return result


# -- from derivations to cyclic proofs ---------------------------------------------


Closer = Callable[[ProofBuilder, Sequent, Multiset, Multiset], int]


def _expand(b: ProofBuilder, sigma, passive: Multiset, left: Multiset, right: Multiset, close: Closer) -> int:
    """Decompose the implications of the active zones, closing the leaves."""
    seq = Sequent(sigma, passive + left, right)
    if seq.is_initial():
        return b.add(axiom(seq))
    shared = _close_shared(b, seq)
    if shared is not None:
        return shared
    for f in right.distinct():
        if isinstance(f, Imp):
            nid = b.reserve()
            prem = _expand(b, sigma, passive, left + [f.left], right.minus([f]) + [f.right], close)
            return b.put(nid, Rule("impr", seq, principal=f), [prem])
    imps = [f for f in left.distinct() if isinstance(f, Imp)]
    if imps:
        # Prefer a pivot one of whose premises closes at once.
        gamma = seq.gamma
        f = min(imps, key=lambda g: (not (g.right is BOT or g.right in right or g.left in gamma), g.key))
        nid = b.reserve()
        rest = left.minus([f])
        p0 = _expand(b, sigma, passive, rest + [f.right], right, close)
        p1 = _expand(b, sigma, passive, rest, right + [f.left], close)
        return b.put(nid, Rule("impl", seq, principal=f), [p0, p1])
    return close(b, seq, left, right)


def _close_shared(b: ProofBuilder, seq: Sequent) -> int | None:
    for f in seq.delta.distinct():
        if f in seq.gamma:
            return b.graft(identity_proof(seq.sigma, seq.gamma.minus([f]), f, seq.delta.minus([f])))
    return None


def _close_taut(b, seq, left, right) -> int:
    nid = _close_shared(b, seq)
    if nid is None:
        raise ValueError(f"leaf {seq} is not closed; the formula is not a tautology")
    return nid


def _id(b: ProofBuilder, sigma, gamma, a, delta=()) -> int:
    return b.graft(identity_proof(sigma, gamma, a, delta))


def _close_modal(schema: str, params: tuple) -> Closer:
    def close(b: ProofBuilder, seq: Sequent, left: Multiset, right: Multiset) -> int:
        nid = _close_shared(b, seq)
        if nid is not None:
            return nid
        sigma = seq.sigma
        if schema == "ax2":
            a, c = params
            imp = Imp(a, c)
            root = b.reserve()
            inner = Sequent(sigma, [imp, a], [c])
            mid = b.put(
                b.reserve(),
                Rule("impl", inner, principal=imp),
                [_id(b, sigma, [a], c), _id(b, sigma, [], a, [c])],
            )
            return b.put(root, Rule("box", seq, principal=Box(c), lam=Multiset([imp, a])), [mid])
        if schema == "ax3":
            a, c = params
            imp = Imp(a, c)
            pi = Multiset([imp, a])
            core = Sequent(sigma, [imp, a, BoxPlus(imp), BoxPlus(a)], [BoxPlus(c)])

            def step() -> int:
                rest = core.gamma.minus([imp])
                return b.put(
                    b.reserve(),
                    Rule("impl", core.with_zones(delta=[c]), principal=imp),
                    [_id(b, sigma, rest, c), _id(b, sigma, rest.minus([a]), a, [c])],
                )

            root = b.reserve()
            first = step()
            loop = b.reserve()
            b.put(loop, Rule("boxplus", core, principal=BoxPlus(c), pi=pi), [step(), b.link(core, loop)])
            return b.put(root, Rule("boxplus", seq, principal=BoxPlus(c), pi=pi), [first, loop])
        if schema == "ax4":
            (a,) = params
            for f in right.distinct():
                if isinstance(f, Box):
                    root = b.reserve()
                    if f.body is a:
                        prem = _id(b, sigma, [BoxPlus(a)], a)
                    else:
                        prem = _id(b, sigma, [a], BoxPlus(a))
                    return b.put(root, Rule("box", seq, principal=f, pi=Multiset([a])), [prem])
        if schema == "ax5":
            (a,) = params
            g = Imp(a, Box(a))
            lam, pi = Multiset([a]), Multiset([g])
            target = BoxPlus(a)
            prem_gamma = [a, g, BoxPlus(g)]
            step_seq = Sequent(sigma, prem_gamma, [target])
            core = Sequent(sigma, [a, Box(a), BoxPlus(g)], [target])
            root = b.reserve()
            first = _id(b, sigma, [g, BoxPlus(g)], a)
            step = b.reserve()
            core_id = b.reserve()
            b.put(
                core_id,
                Rule("boxplus", core, principal=target, lam=lam, pi=pi),
                [_id(b, sigma, [g, BoxPlus(g)], a), b.link(step_seq, step)],
            )
            b.put(
                step,
                Rule("impl", step_seq, principal=g),
                [core_id, _id(b, sigma, [BoxPlus(g)], a, [target])],
            )
            return b.put(root, Rule("boxplus", seq, principal=target, lam=lam, pi=pi), [first, step])
        raise ValueError(f"cannot close {seq} for {schema}")

    return close


def _leaf_proof(sigma: frozenset, gamma: Multiset, formula: Formula, close: Closer) -> CyclicProof:
    b = ProofBuilder(sigma)
    root = _expand(b, sigma, gamma, EMPTY, Multiset([formula]), close)
    return b.build(root)


def _assumptions(d: Derivation) -> set[Formula]:
    found: set[Formula] = set()
    seen: set[int] = set()
    stack = [d]
    while stack:
        node = stack.pop()
        if id(node) in seen:
            continue
        seen.add(id(node))
        if isinstance(node, Assume):
            found.add(node.formula)
        stack.extend(node.children())
    return found


def hilbert_to_sequent(d: Derivation, sigma: Iterable[Formula] = (), gamma: Iterable[Formula] = ()) -> CyclicProof:
    """A cyclic proof (cuts allowed) of ``sigma; gamma => A`` for a derivation of ``A``."""
    sigma = frozenset(sigma)
    gamma = gamma if isinstance(gamma, Multiset) else Multiset(gamma)
    verdict = check_derivation(d, sigma, gamma.distinct())
    if not verdict:
        raise ValueError(f"invalid derivation: {verdict.reason} at node {verdict.node}: {verdict.detail}")
    memo: dict[tuple[int, Multiset], CyclicProof] = {}
    return _to_sequent(d, sigma, gamma, memo)


def _to_sequent(d: Derivation, sigma: frozenset, gamma: Multiset, memo: dict) -> CyclicProof:
    key = (id(d), gamma)
    if key in memo:
        return memo[key]
    a = d.conclusion
    if isinstance(d, Assume):
        result = identity_proof(sigma, gamma.minus([a]), a, ())
    elif isinstance(d, Taut):
        result = _leaf_proof(sigma, gamma, a, _close_taut)
    elif isinstance(d, Axiom):
        result = _leaf_proof(sigma, gamma, a, _close_modal(d.schema, match_schema(d.schema, a)))
    elif isinstance(d, MP):
        minor = _to_sequent(d.left, sigma, gamma, memo)
        major = _to_sequent(d.right, sigma, gamma, memo)
        imp = d.right.conclusion
        just_a = Multiset([a])
        b = ProofBuilder(sigma)
        root = b.reserve()
        left = b.graft(weaken(EMPTY, just_a, major))
        right = b.reserve()
        b.put(
            right,
            Rule("impl", Sequent(sigma, gamma + [imp], [a]), principal=imp),
            [_id(b, sigma, gamma, a), b.graft(weaken(EMPTY, just_a, minor))],
        )
        b.put(root, Rule("cut", Sequent(sigma, gamma, [a]), cut_formula=imp), [left, right])
        result = b.build(root)
    elif isinstance(d, Nec):
        sigma0 = frozenset(_assumptions(d.premise))
        inner_gamma = Multiset(canonical_sorted(sigma0))
        inner = _to_sequent(d.premise, sigma, inner_gamma, memo)
        b = ProofBuilder(sigma)
        root = b.reserve()
        first = b.graft(inner)
        core = Sequent(sigma, inner_gamma, [a])
        if gamma == inner_gamma:
            right = b.link(core, root)
        else:
            right = b.reserve()
            b.put(
                right,
                Rule("boxplus", core, principal=a, sigma0=sigma0),
                [b.graft(inner), b.link(core, right)],
            )
        b.put(root, Rule("boxplus", Sequent(sigma, gamma, [a]), principal=a, sigma0=sigma0), [first, right])
        result = b.build(root)
    else:
        raise TypeError(f"not a derivation: {d!r}")
    memo[key] = result
    return result


# -- from cyclic proofs to derivations ---------------------------------------------


def _conj_of(ms: Multiset) -> Formula:
    return conj_all(list(ms))


def _disj_of(ms: Multiset) -> Formula:
    return disj_all(list(ms))


class _Extractor:
    """Derivations of ``/\\Gamma -> \\/Delta`` for the annotated states of a proof."""

    def __init__(self, p: CyclicProof):
        self.p = p
        self.proved: dict[tuple, Derivation] = {}

    def sequent(self, state) -> Sequent:
        return self.p.nodes[state[0]].conclusion

    def target(self, state) -> Formula:
        s = self.sequent(state)
        return Imp(_conj_of(s.gamma), _disj_of(s.delta))

    def children(self, state) -> list[tuple[tuple, bool]]:
        """Premise states with whether the edge keeps the class."""
        nid, ann = state
        node = self.p.nodes[nid]
        out = []
        for i, (c, ca) in enumerate(zip(node.premises, premise_annotations(node.rule, ann))):
            out.append(((self.p.resolve(c), ca), stays_in_class(node.rule, i, ann)))
        return out

    def prove(self, state) -> Derivation:
        if state in self.proved:
            return self.proved[state]
        nid, ann = state
        if ann is CIRCLE:
            result = self._prove_plain(state)
        else:
            result = self._prove_class(state)
        self.proved[state] = result
        return result

    def _modal_facts(self, rule: Rule, premise: Derivation, goal: Formula) -> list[Derivation]:
        """Facts from which ``/\\Gamma -> []goal`` follows classically."""
        items = list(Multiset(rule.sigma0) + rule.lam + rule.pi + rule.pi.map(BoxPlus))
        curried = classical([premise], imp_chain(items, goal))
        facts = [box_mono(items, goal, curried)]
        facts += [box_intro(Assume(s)) for s in canonical_sorted(rule.sigma0)]
        facts += [AxiomIV(x) for x in rule.pi.distinct()]
        return facts

    def _rule_facts(self, state, in_class: Callable | None) -> list[Derivation]:
        """Facts closing the current node, for the non-class-internal cases."""
        nid, ann = state
        rule = self.p.nodes[nid].rule
        kids = self.children(state)
        if rule.kind == "box":
            return self._modal_facts(rule, self.prove(kids[0][0]), rule.principal.body)
        body = rule.principal.body
        premise_goal = _conj_of(rule_premise_gamma(rule))
        left = self.prove(kids[0][0])
        if in_class is not None and kids[1][1]:
            h = in_class()
            both = conj(body, h)
            d = classical([left], Imp(premise_goal, both))
            return self._modal_facts(rule, d, both)
        right = self.prove(kids[1][0])
        both = conj(body, BoxPlus(body))
        d = classical([left, right], Imp(premise_goal, both))
        return self._modal_facts(rule, d, both) + [unfold(body)]

    def _prove_plain(self, state) -> Derivation:
        nid, _ = state
        rule = self.p.nodes[nid].rule
        target = self.target(state)
        if rule.is_axiom:
            return Taut(target)
        if rule.is_modal:
            return classical(self._rule_facts(state, None), target)
        return classical([self.prove(c) for c, _ in self.children(state)], target)

    def _prove_class(self, root) -> Derivation:
        c = root[1]
        members = self._class_of(root)
        g = {a: self._g(a, c) for a in members}
        h = disj_all(set(g.values()))
        x = Box(conj(c, h))
        claims: dict[tuple, Derivation] = {}

        def claim(a) -> Derivation:
            if a in claims:
                return claims[a]
            nid, _ = a
            rule = self.p.nodes[nid].rule
            goal = Imp(g[a], x)
            if rule.is_axiom:
                result = Taut(goal)
            elif rule.is_modal:
                result = classical(self._rule_facts(a, lambda: h), goal)
            else:
                result = classical([claim(b) for b, _ in self.children(a)], goal)
            claims[a] = result
            return result

        ordered = sorted(members, key=lambda a: a[0])
        step = classical([claim(a) for a in ordered], Imp(h, x))
        reach = adm(c, h, step)
        return classical([reach], self.target(root))

    def _class_of(self, root) -> set:
        members = {root}
        todo = [root]
        while todo:
            state = todo.pop()
            for child, keep in self.children(state):
                if keep and child not in members:
                    members.add(child)
                    todo.append(child)
        return members

    def _g(self, state, c: Formula) -> Formula:
        s = self.sequent(state)
        rest = s.delta.minus([BoxPlus(c)])
        return conj(_conj_of(s.gamma), neg(_disj_of(rest)))


def rule_premise_gamma(rule: Rule) -> Multiset:
    return Multiset(rule.sigma0) + rule.lam + rule.pi + rule.pi.map(BoxPlus)


def sequent_to_hilbert(p: CyclicProof, root_ann: Annotation | str = "auto") -> Derivation:
    """A derivation of ``/\\Gamma -> \\/Delta`` from boxed assumptions in sigma only."""
    verdict = check_proof(p, root_ann)
    if not verdict:
        raise ValueError(f"invalid proof: {verdict.reason} at node {verdict.node}")
    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 20000))
    return _Extractor(p).prove((p.root, verdict.root_annotation))


# -- file format -----------------------------------------------------------------


class HilbertFormatError(ValueError):
    pass


_NODE_FIELDS = {
    "taut": {"id", "rule", "formula"},
    "assume": {"id", "rule", "formula"},
    "mp": {"id", "rule", "premises"},
    "nec": {"id", "rule", "premises"},
    **{s: {"id", "rule", "formula"} for s in SCHEMAS},
}


def derivation_to_json(d: Derivation) -> dict:
    ids = _numbering(d)
    by_id: dict[int, Derivation] = {}
    stack = [d]
    while stack:
        node = stack.pop()
        if ids[id(node)] in by_id:
            continue
        by_id[ids[id(node)]] = node
        stack.extend(node.children())
    nodes = []
    for nid in sorted(by_id):
        node = by_id[nid]
        entry: dict = {"id": nid}
        if isinstance(node, Taut):
            entry.update(rule="taut", formula=print_formula(node.formula))
        elif isinstance(node, Axiom):
            entry.update(rule=node.schema, formula=print_formula(node.formula))
        elif isinstance(node, Assume):
            entry.update(rule="assume", formula=print_formula(node.formula))
        elif isinstance(node, MP):
            entry.update(rule="mp", premises=[ids[id(node.left)], ids[id(node.right)]])
        else:
            entry.update(rule="nec", premises=[ids[id(node.premise)]])
        nodes.append(entry)
    return {"version": 1, "root": ids[id(d)], "nodes": nodes}


def derivation_from_json(data: dict) -> Derivation:
    if not isinstance(data, dict) or data.get("version") != 1:
        raise HilbertFormatError("expected a version 1 derivation object")
    unknown = set(data) - {"version", "root", "nodes"}
    if unknown:
        raise HilbertFormatError(f"unknown fields: {sorted(unknown)}")
    raw_nodes: dict[int, dict] = {}
    for raw in data.get("nodes", []):
        kind = raw.get("rule")
        if kind not in _NODE_FIELDS:
            raise HilbertFormatError(f"unknown rule {kind!r}")
        extra = set(raw) - _NODE_FIELDS[kind]
        if extra:
            raise HilbertFormatError(f"unknown fields for {kind}: {sorted(extra)}")
        if raw["id"] in raw_nodes:
            raise HilbertFormatError(f"duplicate node id {raw['id']!r}")
        raw_nodes[raw["id"]] = raw
    built: dict[int, Derivation] = {}
    visiting: set[int] = set()

    def build(nid: int) -> Derivation:
        if nid in built:
            return built[nid]
        if nid not in raw_nodes:
            raise HilbertFormatError(f"missing node {nid}")
        if nid in visiting:
            raise HilbertFormatError(f"node {nid} depends on itself")
        visiting.add(nid)
        raw = raw_nodes[nid]
        kind = raw["rule"]
        if kind == "taut":
            node: Derivation = Taut(parse_formula(raw["formula"]))
        elif kind == "assume":
            node = Assume(parse_formula(raw["formula"]))
        elif kind in SCHEMAS:
            node = Axiom(kind, parse_formula(raw["formula"]))
        elif kind == "mp":
            left, right = raw["premises"]
            node = MP(build(left), build(right))
        else:
            (premise,) = raw["premises"]
            node = Nec(build(premise))
        visiting.discard(nid)
        built[nid] = node
        return node

    if "root" not in data:
        raise HilbertFormatError("missing root")
    try:
        return build(data["root"])
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, HilbertFormatError) or type(exc).__name__ == "ParseError":
            raise
        raise HilbertFormatError(f"malformed node: {exc}") from None


def load_derivation(text: str) -> Derivation:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise HilbertFormatError(f"invalid JSON: {exc}") from None
    return derivation_from_json(data)


def dump_derivation(d: Derivation) -> str:
    return json.dumps(derivation_to_json(d), indent=2) + "\n"


__all__ += ["box_intro", "box_mono", "plus_mono", "adm", "unfold", "classical", "imp_chain"]
