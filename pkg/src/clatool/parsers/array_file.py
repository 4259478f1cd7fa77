"""Array and outcome files.

An array file starts with a comma-separated header of factor names (any order),
followed by one comma-separated row of value names per line. Blank lines and
``#`` comments are ignored. An outcome file holds one ``pass`` or ``fail`` per
line, in row order.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Iterator, Optional

import numpy as np

from clatool.array import RowSet, TestArray
from clatool.errors import ArrayFormatError, InputError, OutcomeFormatError
from clatool.model import SutModel


def _content_lines(text: str) -> Iterator[tuple[int, str]]:
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield number, line


def _cells(line: str) -> list[str]:
    return [cell.strip() for cell in line.split(",")]


def parse_array(text: str, model: SutModel) -> TestArray:
    """Rows are mapped to the model's factor order; constraints are not checked."""
    lines = list(_content_lines(text))
    if not lines:
        raise ArrayFormatError("missing header line", 1)
    header_line, header = lines[0]
    names = _cells(header)
    if len(set(names)) != len(names):
        raise ArrayFormatError("duplicate factor in header", header_line)
    columns = []
    for name in names:
        try:
            columns.append(model.factor_index(name))
        except InputError:
            raise ArrayFormatError(f"unknown factor '{name}' in header", header_line) from None
    missing = [factor.name for i, factor in enumerate(model.factors) if i not in columns]
    if missing:
        raise ArrayFormatError(f"header lacks factors: {', '.join(missing)}", header_line)

    rows = np.zeros((len(lines) - 1, model.k), dtype=np.int32)
    for r, (number, line) in enumerate(lines[1:]):
        cells = _cells(line)
        if len(cells) != model.k:
            raise ArrayFormatError(f"row has {len(cells)} cells, expected {model.k}", number)
        for column, cell in zip(columns, cells):
            values = model.factors[column].values
            if cell not in values:
                raise ArrayFormatError(
                    f"unknown value '{cell}' for factor '{model.factors[column].name}'", number
                )
            rows[r, column] = values.index(cell)
    return TestArray(model, rows)


def serialize_array(array: TestArray) -> str:
    """Canonical text: header in model order, one row per line."""
    model = array.model
    lines = [",".join(factor.name for factor in model.factors)]
    lines.extend(model.describe_row(row) for row in array)
    return "\n".join(lines) + "\n"


def load_array(path: Path, model: SutModel) -> TestArray:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise InputError(f"Cannot read array file {path}: {e}") from e
    except UnicodeDecodeError as e:
        raise InputError(f"Array file {path} is not valid UTF-8 (byte {e.start})") from e
    return parse_array(text, model)


class Outcome(Enum):
    PASS = "pass"
    FAIL = "fail"


@dataclass(frozen=True)
class OutcomeVector:
    outcomes: tuple[Outcome, ...]

    def __len__(self) -> int:
        return len(self.outcomes)

    def failing_rows(self) -> RowSet:
        return RowSet.from_indices(i for i, outcome in enumerate(self.outcomes) if outcome is Outcome.FAIL)

    @classmethod
    def from_failing(cls, n: int, failing: Iterable[int]) -> OutcomeVector:
        failing = set(failing)
        return cls(tuple(Outcome.FAIL if i in failing else Outcome.PASS for i in range(n)))


def parse_outcomes(text: str, array: Optional[TestArray] = None) -> OutcomeVector:
    outcomes = []
    for number, line in _content_lines(text):
        try:
            outcomes.append(Outcome(line))
        except ValueError:
            raise OutcomeFormatError(f"unknown outcome '{line}', expected pass or fail", number) from None
    if array is not None and len(outcomes) != len(array):
        raise OutcomeFormatError(
            f"length mismatch: {len(outcomes)} outcomes for an array of {len(array)} rows"
        )
    return OutcomeVector(tuple(outcomes))


def load_outcomes(path: Path, array: Optional[TestArray] = None) -> OutcomeVector:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise InputError(f"Cannot read outcome file {path}: {e}") from e
    except UnicodeDecodeError as e:
        raise InputError(f"Outcome file {path} is not valid UTF-8 (byte {e.start})") from e
    return parse_outcomes(text, array)
