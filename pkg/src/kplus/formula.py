"""Modal formulas over implication, falsum, box and box-plus.

Formulas are immutable and hash-consed: building the same formula twice
returns the same object, so equality and hashing are constant time.  The
derived connectives (negation, verum, conjunction, disjunction) expand into
the five primitive constructors immediately.

The ASCII surface syntax is::

    Formula := "false" | Ident | "(" Formula "->" Formula ")"
             | "[]" Formula | "[+]" Formula
    Ident   := [a-zA-Z][a-zA-Z0-9_]*
"""

from __future__ import annotations

import re
import weakref
from dataclasses import dataclass
from typing import Iterable, Iterator

__all__ = [
    "Formula",
    "Var",
    "Bot",
    "Imp",
    "Box",
    "BoxPlus",
    "BOT",
    "ParseError",
    "neg",
    "top",
    "conj",
    "disj",
    "conj_all",
    "disj_all",
    "parse_formula",
    "print_formula",
    "subformula_closure",
    "subformulas",
    "canonical_sorted",
]

_TABLE: "weakref.WeakValueDictionary[tuple, Formula]" = weakref.WeakValueDictionary()


class Formula:
    """Base class of the five formula constructors.

    ``key`` is the canonical sort key: Bot < Var (by name) < Imp < Box <
    BoxPlus, then lexicographic on children.
    """

    __slots__ = ("key", "size", "__weakref__")

    key: tuple
    size: int

    def __setattr__(self, name, value):
        raise AttributeError("formulas are immutable")

    def __lt__(self, other: Formula) -> bool:
        return self.key < other.key

    def __le__(self, other: Formula) -> bool:
        return self.key <= other.key

    def __gt__(self, other: Formula) -> bool:
        return self.key > other.key

    def __ge__(self, other: Formula) -> bool:
        return self.key >= other.key

    def __str__(self) -> str:
        return print_formula(self)

    def children(self) -> tuple[Formula, ...]:
        return ()

    @staticmethod
    def _intern(cls, key: tuple, size: int, **fields) -> Formula:
        obj = _TABLE.get(key)
        if obj is None:
            obj = object.__new__(cls)
            object.__setattr__(obj, "key", key)
            object.__setattr__(obj, "size", size)
            for name, value in fields.items():
                object.__setattr__(obj, name, value)
            _TABLE[key] = obj
        return obj


class Bot(Formula):
    __slots__ = ()
    __match_args__ = ()

    def __new__(cls) -> Bot:
        return Formula._intern(cls, (0,), 1)

    def __reduce__(self):
        return (Bot, ())

    def __repr__(self) -> str:
        return "Bot()"


class Var(Formula):
    __slots__ = ("name",)
    __match_args__ = ("name",)
    name: str

    def __new__(cls, name: str) -> Var:
        if not _IDENT.fullmatch(name) or name == "false":
            raise ValueError(f"not a variable name: {name!r}")
        return Formula._intern(cls, (1, name), 1, name=name)

    def __reduce__(self):
        return (Var, (self.name,))

    def __repr__(self) -> str:
        return f"Var({self.name!r})"


class Imp(Formula):
    __slots__ = ("left", "right")
    __match_args__ = ("left", "right")
    left: Formula
    right: Formula

    def __new__(cls, left: Formula, right: Formula) -> Imp:
        return Formula._intern(
            cls, (2, left.key, right.key), 1 + left.size + right.size, left=left, right=right
        )

    def children(self) -> tuple[Formula, ...]:
        return (self.left, self.right)

    def __reduce__(self):
        return (Imp, (self.left, self.right))

    def __repr__(self) -> str:
        return f"Imp({self.left!r}, {self.right!r})"


class Box(Formula):
    __slots__ = ("body",)
    __match_args__ = ("body",)
    body: Formula

    def __new__(cls, body: Formula) -> Box:
        return Formula._intern(cls, (3, body.key), 1 + body.size, body=body)

    def children(self) -> tuple[Formula, ...]:
        return (self.body,)

    def __reduce__(self):
        return (Box, (self.body,))

    def __repr__(self) -> str:
        return f"Box({self.body!r})"


class BoxPlus(Formula):
    __slots__ = ("body",)
    __match_args__ = ("body",)
    body: Formula

    def __new__(cls, body: Formula) -> BoxPlus:
        return Formula._intern(cls, (4, body.key), 1 + body.size, body=body)

    def children(self) -> tuple[Formula, ...]:
        return (self.body,)

    def __reduce__(self):
        return (BoxPlus, (self.body,))

    def __repr__(self) -> str:
        return f"BoxPlus({self.body!r})"


BOT = Bot()


# -- derived connectives -----------------------------------------------------


def neg(a: Formula) -> Formula:
    """Negation, written as ``a -> false``."""
    return Imp(a, BOT)


def top() -> Formula:
    """Verum, the negation of falsum."""
    return neg(BOT)


def conj(a: Formula, b: Formula) -> Formula:
    """Conjunction ``not (a -> not b)``."""
    return neg(Imp(a, neg(b)))


def disj(a: Formula, b: Formula) -> Formula:
    """Disjunction ``not a -> b``."""
    return Imp(neg(a), b)


def canonical_sorted(fs: Iterable[Formula]) -> list[Formula]:
    return sorted(fs, key=lambda f: f.key)


def conj_all(fs: Iterable[Formula]) -> Formula:
    """Left-associated conjunction in canonical order; empty gives verum."""
    items = canonical_sorted(fs)
    if not items:
        return top()
    acc = items[0]
    for f in items[1:]:
        acc = conj(acc, f)
    return acc


def disj_all(fs: Iterable[Formula]) -> Formula:
    """Left-associated disjunction in canonical order; empty gives falsum."""
    items = canonical_sorted(fs)
    if not items:
        return BOT
    acc = items[0]
    for f in items[1:]:
        acc = disj(acc, f)
    return acc


# -- subformulas -------------------------------------------------------------


def subformulas(f: Formula) -> Iterator[Formula]:
    """Yield every subformula occurrence of ``f`` (pre-order, with repeats)."""
    stack = [f]
    while stack:
        g = stack.pop()
        yield g
        stack.extend(reversed(g.children()))


def subformula_closure(fs: Iterable[Formula]) -> frozenset[Formula]:
    seen: set[Formula] = set()
    stack = list(fs)
    while stack:
        g = stack.pop()
        if g not in seen:
            seen.add(g)
            stack.extend(g.children())
    return frozenset(seen)


# -- lexing and parsing ------------------------------------------------------

_IDENT = re.compile(r"[a-zA-Z][a-zA-Z0-9_]*")
_TOKEN = re.compile(
    r"\s*(?:(?P<sym>->|=>|\[\+\]|\[\]|[(){};,])|(?P<ident>[a-zA-Z][a-zA-Z0-9_]*))"
)
_FORMULA_START = frozenset({"false", "identifier", "(", "[]", "[+]"})


class ParseError(ValueError):
    """Malformed input.  ``offset`` is a byte offset into the UTF-8 text."""

    def __init__(self, offset: int, expected: Iterable[str], found: str):
        self.offset = offset
        self.expected = frozenset(expected)
        self.found = found
        wanted = ", ".join(sorted(self.expected)) or "nothing"
        super().__init__(f"at offset {offset}: expected one of {wanted}; found {found}")


@dataclass(frozen=True)
class Token:
    kind: str  # a symbol, "identifier", "false" or "end"
    text: str
    offset: int


def tokenize(text: str) -> list[Token]:
    """Split ``text`` into tokens; offsets are UTF-8 byte offsets."""
    tokens: list[Token] = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            tokens.append(Token("end", "", _byte_offset(text, pos)))
            return tokens
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(_byte_offset(text, pos), ["token"], repr(text[pos]))
        if m.group("sym"):
            tok = Token(m.group("sym"), m.group("sym"), _byte_offset(text, m.start("sym")))
        else:
            word = m.group("ident")
            kind = "false" if word == "false" else "identifier"
            tok = Token(kind, word, _byte_offset(text, m.start("ident")))
        tokens.append(tok)
        pos = m.end()


def _byte_offset(text: str, pos: int) -> int:
    return len(text[:pos].encode("utf-8"))


class TokenStream:
    """Cursor over a token list, shared by the formula and sequent parsers."""

    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.pos = 0

    @property
    def peek(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "end":
            self.pos += 1
        return tok

    def fail(self, expected: Iterable[str]) -> ParseError:
        tok = self.peek
        found = "end of input" if tok.kind == "end" else repr(tok.text)
        return ParseError(tok.offset, expected, found)

    def expect(self, kind: str) -> Token:
        if self.peek.kind != kind:
            raise self.fail([kind])
        return self.advance()

    def formula(self) -> Formula:
        # Iterative on prefix operators so long box chains do not recurse.
        prefixes: list[str] = []
        while self.peek.kind in ("[]", "[+]"):
            prefixes.append(self.advance().kind)
        tok = self.peek
        if tok.kind == "false":
            self.advance()
            f: Formula = BOT
        elif tok.kind == "identifier":
            self.advance()
            f = Var(tok.text)
        elif tok.kind == "(":
            self.advance()
            left = self.formula()
            self.expect("->")
            right = self.formula()
            self.expect(")")
            f = Imp(left, right)
        else:
            raise self.fail(_FORMULA_START)
        for op in reversed(prefixes):
            f = Box(f) if op == "[]" else BoxPlus(f)
        return f

    def formula_list(self, stop: Iterable[str]) -> list[Formula]:
        """Comma-separated, possibly empty list ending before a ``stop`` token."""
        stop = frozenset(stop)
        if self.peek.kind in stop:
            return []
        items = [self.formula()]
        while self.peek.kind == ",":
            self.advance()
            items.append(self.formula())
        if self.peek.kind not in stop:
            raise self.fail(stop | {","})
        return items


def parse_formula(text: str) -> Formula:
    """Parse a formula in the ASCII syntax, raising ParseError on bad input."""
    ts = TokenStream(text)
    f = ts.formula()
    if ts.peek.kind != "end":
        raise ts.fail(["end"])
    return f


def print_formula(f: Formula) -> str:
    match f:
        case Bot():
            return "false"
        case Var(name):
            return name
        case Imp(left, right):
            return f"({print_formula(left)} -> {print_formula(right)})"
        case Box(body):
            return "[]" + print_formula(body)
        case BoxPlus(body):
            return "[+]" + print_formula(body)
    raise TypeError(f"not a formula: {f!r}")
