"""Sequents ``Sigma; Gamma => Delta`` with multiset zones, and annotations."""

from __future__ import annotations

from collections import Counter
from typing import Iterable, Iterator, Union

from .formula import BoxPlus, Formula, TokenStream, ParseError, canonical_sorted, print_formula

__all__ = [
    "Multiset",
    "Sequent",
    "Circle",
    "CIRCLE",
    "Annotation",
    "AnnotatedSequent",
    "AnnotationError",
    "annotation_candidates",
    "parse_sequent",
    "parse_goal",
    "print_sequent",
    "print_goal",
    "print_annotation",
    "parse_annotation",
]


class Multiset:
    """Immutable finite multiset of formulas.

    Stored as canonically ordered ``(formula, count)`` pairs so equal
    multisets are structurally equal and hash alike.
    """

    __slots__ = ("items", "_hash", "_len")

    items: tuple[tuple[Formula, int], ...]

    def __init__(self, formulas: Iterable[Formula] = ()):
        counts = Counter(formulas)
        self._set_counts(counts)

    def _set_counts(self, counts) -> None:
        items = tuple(
            (f, counts[f]) for f in canonical_sorted(f for f, n in counts.items() if n > 0)
        )
        object.__setattr__(self, "items", items)
        object.__setattr__(self, "_hash", hash(items))
        object.__setattr__(self, "_len", sum(n for _, n in items))

    @classmethod
    def from_counts(cls, counts) -> Multiset:
        ms = cls.__new__(cls)
        ms._set_counts(counts)
        return ms

    def __setattr__(self, name, value):
        raise AttributeError("multisets are immutable")

    def __reduce__(self):
        return (Multiset, (tuple(self),))

    # -- queries ----------------------------------------------------------

    def counts(self) -> Counter:
        return Counter(dict(self.items))

    def count(self, f: Formula) -> int:
        for g, n in self.items:
            if g is f:
                return n
        return 0

    def __contains__(self, f: object) -> bool:
        return any(g is f for g, _ in self.items)

    def __iter__(self) -> Iterator[Formula]:
        for f, n in self.items:
            for _ in range(n):
                yield f

    def __len__(self) -> int:
        return self._len

    def __bool__(self) -> bool:
        return self._len > 0

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Multiset) and self.items == other.items

    def __hash__(self) -> int:
        return self._hash

    def distinct(self) -> tuple[Formula, ...]:
        return tuple(f for f, _ in self.items)

    def has_repetitions(self) -> bool:
        return any(n > 1 for _, n in self.items)

    def issubset(self, other: Multiset) -> bool:
        oc = dict(other.items)
        return all(oc.get(f, 0) >= n for f, n in self.items)

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other: Multiset | Iterable[Formula]) -> Multiset:
        c = self.counts()
        c.update(other)
        return Multiset.from_counts(c)

    def minus(self, other: Multiset | Iterable[Formula]) -> Multiset:
        """Exact difference; raises ValueError unless ``other`` is contained."""
        c = self.counts()
        for f in other:
            if c[f] <= 0:
                raise ValueError(f"{print_formula(f)} is not in the multiset")
            c[f] -= 1
        return Multiset.from_counts(c)

    def truncated_minus(self, other: Multiset) -> Multiset:
        """Difference truncated at zero multiplicity."""
        c = self.counts()
        c.subtract(other.counts())
        return Multiset.from_counts(c)

    def union_max(self, other: Multiset) -> Multiset:
        """Union taking the larger multiplicity of each formula."""
        return Multiset.from_counts(self.counts() | other.counts())

    def deduplicated(self) -> Multiset:
        return Multiset(self.distinct())

    def map(self, fn) -> Multiset:
        return Multiset(fn(f) for f in self)

    def __repr__(self) -> str:
        return "Multiset([" + ", ".join(print_formula(f) for f in self) + "])"


EMPTY = Multiset()


def _ms(x: Multiset | Iterable[Formula]) -> Multiset:
    return x if isinstance(x, Multiset) else Multiset(x)


class Sequent:
    """``sigma; gamma => delta`` with a set ``sigma`` and multisets ``gamma``, ``delta``."""

    __slots__ = ("sigma", "gamma", "delta", "_hash")

    sigma: frozenset[Formula]
    gamma: Multiset
    delta: Multiset

    def __init__(self, sigma: Iterable[Formula], gamma, delta):
        object.__setattr__(self, "sigma", frozenset(sigma))
        object.__setattr__(self, "gamma", _ms(gamma))
        object.__setattr__(self, "delta", _ms(delta))
        object.__setattr__(self, "_hash", hash((self.sigma, self.gamma, self.delta)))

    def __setattr__(self, name, value):
        raise AttributeError("sequents are immutable")

    def __reduce__(self):
        return (Sequent, (self.sigma, self.gamma, self.delta))

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Sequent)
            and self._hash == other._hash
            and self.gamma == other.gamma
            and self.delta == other.delta
            and self.sigma == other.sigma
        )

    def __hash__(self) -> int:
        return self._hash

    def with_zones(self, gamma=None, delta=None) -> Sequent:
        return Sequent(
            self.sigma,
            self.gamma if gamma is None else gamma,
            self.delta if delta is None else delta,
        )

    def weakened(self, phi: Multiset, psi: Multiset) -> Sequent:
        return Sequent(self.sigma, self.gamma + phi, self.delta + psi)

    def is_initial(self) -> bool:
        """A p-axiom (shared variable) or falsum on the left."""
        from .formula import Bot, Var

        for f in self.gamma.distinct():
            if isinstance(f, Bot):
                return True
            if isinstance(f, Var) and f in self.delta:
                return True
        return False

    def __repr__(self) -> str:
        return f"Sequent({print_sequent(self)!r})"

    def __str__(self) -> str:
        return print_sequent(self)


class Circle:
    """The empty annotation."""

    __slots__ = ()
    _instance: Circle | None = None

    def __new__(cls) -> Circle:
        if cls._instance is None:
            cls._instance = object.__new__(cls)
        return cls._instance

    def __reduce__(self):
        return (Circle, ())

    def __repr__(self) -> str:
        return "CIRCLE"

    def __str__(self) -> str:
        return "circle"


CIRCLE = Circle()

Annotation = Union[Formula, Circle]


class AnnotationError(ValueError):
    pass


class AnnotatedSequent:
    """A sequent with an annotation; a formula annotation ``s`` needs ``[+]s`` in delta."""

    __slots__ = ("sequent", "ann")

    def __init__(self, sequent: Sequent, ann: Annotation):
        if ann is not CIRCLE and BoxPlus(ann) not in sequent.delta:
            raise AnnotationError(
                f"annotation {print_annotation(ann)} needs [+]{print_formula(ann)} on the right"
            )
        object.__setattr__(self, "sequent", sequent)
        object.__setattr__(self, "ann", ann)

    def __setattr__(self, name, value):
        raise AttributeError("annotated sequents are immutable")

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, AnnotatedSequent)
            and self.ann is other.ann
            and self.sequent == other.sequent
        )

    def __hash__(self) -> int:
        return hash((self.sequent, self.ann))

    def __repr__(self) -> str:
        return f"AnnotatedSequent({print_sequent(self.sequent)!r}, {print_annotation(self.ann)})"


def annotation_candidates(s: Sequent) -> list[Annotation]:
    """Circle first, then each ``A`` with ``[+]A`` in delta, in canonical order."""
    bodies = [f.body for f in s.delta.distinct() if isinstance(f, BoxPlus)]
    return [CIRCLE, *canonical_sorted(bodies)]


def print_annotation(a: Annotation) -> str:
    return "circle" if a is CIRCLE else print_formula(a)


def parse_annotation(text: str) -> Annotation:
    """``circle`` (or the ring sign) denotes the empty annotation; anything else is a formula."""
    from .formula import parse_formula

    stripped = text.strip()
    if stripped in ("circle", "◦"):
        return CIRCLE
    return parse_formula(stripped)


def _print_list(fs: Iterable[Formula]) -> str:
    return ", ".join(print_formula(f) for f in fs)


def print_goal(s: Sequent) -> str:
    """The ``gamma => delta`` part, without sigma."""
    left = _print_list(s.gamma)
    right = _print_list(s.delta)
    return f"{left} => {right}".strip()


def print_sequent(s: Sequent) -> str:
    sigma = _print_list(canonical_sorted(s.sigma))
    inner = f"{{ {sigma} }}" if sigma else "{ }"
    return f"{inner} ; {print_goal(s)}"


def parse_sequent(text: str) -> Sequent:
    ts = TokenStream(text)
    ts.expect("{")
    sigma = ts.formula_list({"}"})
    ts.expect("}")
    ts.expect(";")
    gamma = ts.formula_list({"=>"})
    ts.expect("=>")
    delta = ts.formula_list({"end"})
    return Sequent(sigma, gamma, delta)


def parse_goal(text: str, sigma: Iterable[Formula] = ()) -> Sequent:
    """Parse ``gamma => delta`` and attach the ambient ``sigma``."""
    ts = TokenStream(text)
    gamma = ts.formula_list({"=>"})
    ts.expect("=>")
    delta = ts.formula_list({"end"})
    return Sequent(sigma, gamma, delta)


__all__ += ["EMPTY", "ParseError"]
