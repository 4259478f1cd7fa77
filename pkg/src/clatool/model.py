"""SUT model: factors, constraints, tests and interactions."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

from clatool.constraints import ConstraintExpr, conjunction, factors_of
from clatool.errors import InputError

# A test: one value index per factor, in factor order.
Row = tuple[int, ...]


@dataclass(frozen=True)
class Factor:
    name: str
    values: tuple[str, ...]

    def __post_init__(self):
        if len(self.values) < 2:
            raise InputError(f"Factor '{self.name}' needs at least 2 values, got {len(self.values)}")
        if len(set(self.values)) != len(self.values):
            raise InputError(f"Factor '{self.name}' has duplicate value names")

    @property
    def size(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class Interaction:
    """Assignment to distinct factors, kept sorted by factor index.

    The empty interaction is the 0-way interaction covered by every test.
    """

    pairs: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        pairs = tuple(sorted((int(f), int(v)) for f, v in self.pairs))
        if len({f for f, _ in pairs}) != len(pairs):
            raise InputError(f"Interaction assigns a factor twice: {pairs}")
        object.__setattr__(self, "pairs", pairs)

    @classmethod
    def of(cls, *pairs: tuple[int, int]) -> Interaction:
        return cls(tuple(pairs))

    @property
    def strength(self) -> int:
        return len(self.pairs)

    @property
    def factors(self) -> tuple[int, ...]:
        return tuple(f for f, _ in self.pairs)

    @property
    def sort_key(self) -> tuple:
        return (len(self.pairs), self.pairs)

    def covered_by(self, row: Sequence[int]) -> bool:
        return all(row[f] == v for f, v in self.pairs)

    def issubset(self, other: Interaction) -> bool:
        return set(self.pairs) <= set(other.pairs)

    def __len__(self) -> int:
        return len(self.pairs)


EMPTY_INTERACTION = Interaction(())

InteractionSet = frozenset  # frozenset[Interaction]


def set_sort_key(ts: Iterable[Interaction]) -> tuple:
    keys = sorted(member.sort_key for member in ts)
    return (len(keys), tuple(keys))


def canonical_members(ts: Iterable[Interaction]) -> list[Interaction]:
    return sorted(ts, key=lambda member: member.sort_key)


@dataclass(frozen=True)
class SutModel:
    """System under test: named factors plus a conjunction of constraint lines."""

    name: str
    factors: tuple[Factor, ...]
    constraints: tuple[ConstraintExpr, ...] = field(default=())

    def __post_init__(self):
        if not self.factors:
            raise InputError("A model needs at least one factor")
        names = [factor.name for factor in self.factors]
        if len(set(names)) != len(names):
            raise InputError(f"Duplicate factor names in model '{self.name}'")
        for expr in self.constraints:
            for atom in expr.atoms():
                if not 0 <= atom.factor < len(self.factors):
                    raise InputError(f"Constraint references factor index {atom.factor}")
                if not 0 <= atom.value < self.factors[atom.factor].size:
                    raise InputError(
                        f"Constraint references value {atom.value} of factor "
                        f"'{self.factors[atom.factor].name}'"
                    )

    @property
    def k(self) -> int:
        return len(self.factors)

    @property
    def domain_sizes(self) -> tuple[int, ...]:
        return tuple(factor.size for factor in self.factors)

    @property
    def space_size(self) -> int:
        """Number of syntactic tests, valid or not."""
        return math.prod(self.domain_sizes)

    @property
    def constraint(self) -> ConstraintExpr:
        return conjunction(self.constraints)

    @cached_property
    def constraint_factors(self) -> tuple[frozenset[int], ...]:
        return tuple(factors_of(expr) for expr in self.constraints)

    @cached_property
    def watchers(self) -> tuple[tuple[int, ...], ...]:
        """Per factor, the indices of constraint lines reading it."""
        watch: list[list[int]] = [[] for _ in self.factors]
        for index, factors in enumerate(self.constraint_factors):
            for f in factors:
                watch[f].append(index)
        return tuple(tuple(indices) for indices in watch)

    def without_constraints(self) -> SutModel:
        return SutModel(self.name, self.factors, ())

    def factor_index(self, name: str) -> int:
        for index, factor in enumerate(self.factors):
            if factor.name == name:
                return index
        raise InputError(f"Unknown factor '{name}'")

    def value_index(self, factor: int, name: str) -> int:
        values = self.factors[factor].values
        if name not in values:
            raise InputError(f"Unknown value '{name}' for factor '{self.factors[factor].name}'")
        return values.index(name)

    def interaction(self, **assignment: str) -> Interaction:
        """Build an interaction from factor and value names."""
        pairs = []
        for factor_name, value_name in assignment.items():
            f = self.factor_index(factor_name)
            pairs.append((f, self.value_index(f, str(value_name))))
        return Interaction(tuple(pairs))

    def check_row(self, row: Sequence[int]) -> None:
        if len(row) != self.k:
            raise InputError(f"Test has {len(row)} entries, model has {self.k} factors")
        for f, v in enumerate(row):
            if not 0 <= v < self.factors[f].size:
                raise InputError(
                    f"Value index {v} out of range for factor '{self.factors[f].name}'"
                )

    def check_interaction(self, interaction: Interaction) -> None:
        for f, v in interaction.pairs:
            if not 0 <= f < self.k:
                raise InputError(f"Interaction references factor index {f}")
            if not 0 <= v < self.factors[f].size:
                raise InputError(
                    f"Value index {v} out of range for factor '{self.factors[f].name}'"
                )

    def describe(self, interaction: Interaction) -> str:
        inner = ", ".join(
            f"{self.factors[f].name}={self.factors[f].values[v]}" for f, v in interaction.pairs
        )
        return f"({inner})"

    def describe_set(self, ts: Iterable[Interaction]) -> str:
        return "{" + ", ".join(self.describe(member) for member in canonical_members(ts)) + "}"

    def describe_row(self, row: Sequence[int]) -> str:
        return ",".join(self.factors[f].values[v] for f, v in enumerate(row))


def evaluate(model: SutModel, row: Sequence[int]) -> bool:
    """Truth value of the model's constraints at a full test."""
    model.check_row(row)
    return all(expr.evaluate(row) for expr in model.constraints)
