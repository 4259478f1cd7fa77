"""Constraint expression tree with full and three-valued evaluation.

Nodes are immutable. ``evaluate`` takes a full assignment (one value index per
factor). ``partial`` takes an assignment where unassigned factors hold ``None``
and returns ``True``/``False`` when the outcome is already decided, else ``None``.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Optional, Sequence, Union

Partial = Optional[bool]


class Polarity(Enum):
    EQUALS = "="
    NOT_EQUALS = "!="


@dataclass(frozen=True)
class Atom:
    factor: int
    value: int
    polarity: Polarity = Polarity.EQUALS

    def evaluate(self, row: Sequence[int]) -> bool:
        return (row[self.factor] == self.value) == (self.polarity is Polarity.EQUALS)

    def partial(self, assignment: Sequence[int | None]) -> Partial:
        current = assignment[self.factor]
        if current is None:
            return None
        return (current == self.value) == (self.polarity is Polarity.EQUALS)

    def atoms(self) -> Iterator[Atom]:
        yield self


@dataclass(frozen=True)
class Not:
    child: ConstraintExpr

    def evaluate(self, row: Sequence[int]) -> bool:
        return not self.child.evaluate(row)

    def partial(self, assignment: Sequence[int | None]) -> Partial:
        value = self.child.partial(assignment)
        return None if value is None else not value

    def atoms(self) -> Iterator[Atom]:
        yield from self.child.atoms()


@dataclass(frozen=True)
class And:
    children: tuple[ConstraintExpr, ...]

    def evaluate(self, row: Sequence[int]) -> bool:
        return all(child.evaluate(row) for child in self.children)

    def partial(self, assignment: Sequence[int | None]) -> Partial:
        result: Partial = True
        for child in self.children:
            value = child.partial(assignment)
            if value is False:
                return False
            if value is None:
                result = None
        return result

    def atoms(self) -> Iterator[Atom]:
        for child in self.children:
            yield from child.atoms()


@dataclass(frozen=True)
class Or:
    children: tuple[ConstraintExpr, ...]

    def evaluate(self, row: Sequence[int]) -> bool:
        return any(child.evaluate(row) for child in self.children)

    def partial(self, assignment: Sequence[int | None]) -> Partial:
        result: Partial = False
        for child in self.children:
            value = child.partial(assignment)
            if value is True:
                return True
            if value is None:
                result = None
        return result

    def atoms(self) -> Iterator[Atom]:
        for child in self.children:
            yield from child.atoms()


@dataclass(frozen=True)
class Implies:
    lhs: ConstraintExpr
    rhs: ConstraintExpr

    def evaluate(self, row: Sequence[int]) -> bool:
        return (not self.lhs.evaluate(row)) or self.rhs.evaluate(row)

    def partial(self, assignment: Sequence[int | None]) -> Partial:
        lhs = self.lhs.partial(assignment)
        if lhs is False:
            return True
        rhs = self.rhs.partial(assignment)
        if rhs is True:
            return True
        if lhs is True and rhs is False:
            return False
        return None

    def atoms(self) -> Iterator[Atom]:
        yield from self.lhs.atoms()
        yield from self.rhs.atoms()


@dataclass(frozen=True)
class ConstTrue:
    def evaluate(self, row: Sequence[int]) -> bool:
        return True

    def partial(self, assignment: Sequence[int | None]) -> Partial:
        return True

    def atoms(self) -> Iterator[Atom]:
        return iter(())


ConstraintExpr = Union[Atom, Not, And, Or, Implies, ConstTrue]

# Binding strength used when printing; higher binds tighter.
PRECEDENCE = {Implies: 1, Or: 2, And: 3, Not: 4, Atom: 5, ConstTrue: 5}


def factors_of(expr: ConstraintExpr) -> frozenset[int]:
    """Factor indices an expression reads."""
    return frozenset(atom.factor for atom in expr.atoms())


def conjunction(exprs: Sequence[ConstraintExpr]) -> ConstraintExpr:
    if not exprs:
        return ConstTrue()
    if len(exprs) == 1:
        return exprs[0]
    return And(tuple(exprs))


def relabel(expr: ConstraintExpr, mapping: dict[int, int]) -> ConstraintExpr:
    """Copy of ``expr`` with every atom's factor index replaced through ``mapping``."""
    if isinstance(expr, Atom):
        return Atom(mapping[expr.factor], expr.value, expr.polarity)
    if isinstance(expr, Not):
        return Not(relabel(expr.child, mapping))
    if isinstance(expr, And):
        return And(tuple(relabel(child, mapping) for child in expr.children))
    if isinstance(expr, Or):
        return Or(tuple(relabel(child, mapping) for child in expr.children))
    if isinstance(expr, Implies):
        return Implies(relabel(expr.lhs, mapping), relabel(expr.rhs, mapping))
    return expr
