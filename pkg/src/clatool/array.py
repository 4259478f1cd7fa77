"""Test arrays and row sets.

A RowSet is stored as an integer bitmask (bit i set when row i is a member), so
equal row sets hash equally and set algebra is integer arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Sequence, Union

import numpy as np

from clatool.errors import InputError
from clatool.model import Interaction, Row, SutModel, evaluate


@dataclass(frozen=True, slots=True)
class RowSet:
    bits: int = 0

    @classmethod
    def from_indices(cls, indices: Iterable[int]) -> RowSet:
        bits = 0
        for index in indices:
            bits |= 1 << int(index)
        return cls(bits)

    @classmethod
    def from_mask(cls, mask: np.ndarray) -> RowSet:
        return cls(mask_to_bits(mask))

    @classmethod
    def full(cls, n: int) -> RowSet:
        return cls((1 << n) - 1)

    def __iter__(self) -> Iterator[int]:
        bits, index = self.bits, 0
        while bits:
            if bits & 1:
                yield index
            bits >>= 1
            index += 1

    def __len__(self) -> int:
        return bin(self.bits).count("1")

    def __contains__(self, index: int) -> bool:
        return bool(self.bits >> index & 1)

    def __or__(self, other: RowSet) -> RowSet:
        return RowSet(self.bits | other.bits)

    def __and__(self, other: RowSet) -> RowSet:
        return RowSet(self.bits & other.bits)

    def without(self, index: int) -> RowSet:
        return RowSet(self.bits & ~(1 << index))

    def is_empty(self) -> bool:
        return self.bits == 0

    def to_list(self) -> list[int]:
        return list(self)


def mask_to_bits(mask: np.ndarray) -> int:
    """Pack a boolean vector into an int with element i at bit i."""
    packed = np.packbits(np.asarray(mask, dtype=bool), bitorder="little")
    return int.from_bytes(packed.tobytes(), "little")


class TestArray:
    """Ordered rows over a model; row identity is the row index.

    Rows are not checked against the constraints here.
    """

    __test__ = False

    def __init__(self, model: SutModel, rows: np.ndarray | Sequence[Sequence[int]]):
        data = np.asarray(rows, dtype=np.int32)
        if data.size == 0:
            data = np.zeros((0, model.k), dtype=np.int32)
        if data.ndim != 2 or data.shape[1] != model.k:
            raise InputError(f"Array rows must have {model.k} entries, got shape {data.shape}")
        sizes = np.asarray(model.domain_sizes)
        if data.shape[0] and ((data < 0).any() or (data >= sizes).any()):
            raise InputError("Array contains a value index outside its factor's domain")
        data.setflags(write=False)
        self.model = model
        self.rows = data

    def __len__(self) -> int:
        return self.rows.shape[0]

    def __iter__(self) -> Iterator[Row]:
        for row in self.rows:
            yield tuple(int(v) for v in row)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TestArray):
            return NotImplemented
        return self.model == other.model and np.array_equal(self.rows, other.rows)

    __hash__ = None

    def __repr__(self) -> str:
        return f"TestArray(model={self.model.name!r}, rows={len(self)})"

    def row(self, index: int) -> Row:
        return tuple(int(v) for v in self.rows[index])

    def subarray(self, indices: Iterable[int]) -> TestArray:
        return TestArray(self.model, self.rows[list(indices)])

    def invalid_rows(self) -> list[int]:
        return [index for index, row in enumerate(self) if not evaluate(self.model, row)]

    def duplicate_rows(self) -> list[int]:
        """Indices of rows equal to an earlier row."""
        seen: set[Row] = set()
        duplicates = []
        for index, row in enumerate(self):
            if row in seen:
                duplicates.append(index)
            seen.add(row)
        return duplicates

    @cached_property
    def value_bits(self) -> tuple[tuple[int, ...], ...]:
        """Per factor and value, the bitmask of rows holding that value."""
        return tuple(
            tuple(mask_to_bits(self.rows[:, f] == v) for v in range(size))
            for f, size in enumerate(self.model.domain_sizes)
        )

    def interaction_bits(self, interaction: Interaction) -> int:
        bits = (1 << len(self)) - 1
        value_bits = self.value_bits
        for f, v in interaction.pairs:
            bits &= value_bits[f][v]
        return bits


Target = Union[Interaction, frozenset, set]


def covering_rows(array: TestArray, target: Target) -> RowSet:
    """Rows covering an interaction, or covering any member of an interaction set."""
    if isinstance(target, Interaction):
        array.model.check_interaction(target)
        return RowSet(array.interaction_bits(target))
    bits = 0
    for member in target:
        array.model.check_interaction(member)
        bits |= array.interaction_bits(member)
    return RowSet(bits)
