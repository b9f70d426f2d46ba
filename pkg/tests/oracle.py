"""A brute-force truth-table evaluator, independent of the package's decision procedure."""

from __future__ import annotations

import itertools

from kplus.formula import Bot, Formula, Imp


def opaque_atoms(f: Formula) -> list[Formula]:
    found: list[Formula] = []

    def visit(g):
        if isinstance(g, Imp):
            visit(g.left)
            visit(g.right)
        elif not isinstance(g, Bot) and g not in found:
            found.append(g)

    visit(f)
    return found


def evaluate(f: Formula, value: dict) -> bool:
    if isinstance(f, Bot):
        return False
    if isinstance(f, Imp):
        return (not evaluate(f.left, value)) or evaluate(f.right, value)
    return value[f]


def truth_table_valid(f: Formula) -> bool:
    atoms = opaque_atoms(f)
    for bits in itertools.product((False, True), repeat=len(atoms)):
        if not evaluate(f, dict(zip(atoms, bits))):
            return False
    return True


def equivalent(a: Formula, b: Formula) -> bool:
    return truth_table_valid(Imp(a, b)) and truth_table_valid(Imp(b, a))
