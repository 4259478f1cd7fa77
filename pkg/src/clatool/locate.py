"""Fault localization: which interaction sets explain the failing rows."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any

from clatool.array import RowSet, TestArray
from clatool.distinguish import (
    DEFAULT_CAP_UNIVERSE,
    Distinguisher,
    base_interactions,
    interaction_set_universe,
)
from clatool.enumeration import DEFAULT_CAP_TESTS
from clatool.errors import InputError
from clatool.model import SutModel
from clatool.parsers.array_file import OutcomeVector

logger = logging.getLogger(__name__)


@dataclass
class CandidateClass:
    """Mutually indistinguishable candidate sets sharing the failing rows."""

    index: int
    sets: list[frozenset]
    rows: RowSet


@dataclass
class LocalizationResult:
    model: SutModel
    failing: RowSet
    classes: list[CandidateClass] = field(default_factory=list)
    params: dict[str, Any] = field(default_factory=dict)

    @property
    def explained(self) -> bool:
        return bool(self.classes)

    @property
    def unique(self) -> bool:
        return len(self.classes) == 1

    def to_dict(self) -> dict[str, Any]:
        return {
            "params": self.params,
            "failing_rows": self.failing.to_list(),
            "explained": self.explained,
            "classes": [
                {
                    "index": cls.index,
                    "rows": cls.rows.to_list(),
                    "members": [self.model.describe_set(ts) for ts in cls.sets],
                }
                for cls in self.classes
            ],
        }

    def render_text(self) -> str:
        lines = [f"failing rows: {self.failing.to_list()}"]
        if not self.explained:
            lines.append("UNEXPLAINED: no interaction set in the hypothesis space matches the outcomes")
            return "\n".join(lines) + "\n"
        for cls in self.classes:
            lines.append(f"class {cls.index}:")
            lines.extend(f"  {self.model.describe_set(ts)}" for ts in cls.sets)
        return "\n".join(lines) + "\n"


def locate_faults(
    model: SutModel,
    array: TestArray,
    outcomes: OutcomeVector,
    d: int,
    t: int,
    bar_d: bool = False,
    bar_t: bool = False,
    *,
    cap_tests: int = DEFAULT_CAP_TESTS,
    cap_universe: int = DEFAULT_CAP_UNIVERSE,
) -> LocalizationResult:
    """Candidate failure-triggering sets whose covering rows equal the failing rows."""
    if len(outcomes) != len(array):
        raise InputError(f"{len(outcomes)} outcomes for an array of {len(array)} rows")
    if d < 1:
        raise InputError(f"d must be at least 1, got {d}")
    failing = outcomes.failing_rows()
    base = base_interactions(model, t, bar_t, cap_tests=cap_tests)
    universe = interaction_set_universe(
        base, d, bar_d=bar_d, independent_only=bar_t, cap=cap_universe
    )
    candidates = []
    for ts in universe:
        bits = 0
        for member in ts:
            bits |= array.interaction_bits(member)
        if bits == failing.bits:
            candidates.append(ts)

    result = LocalizationResult(
        model, failing, params={"d": d, "bar_d": bar_d, "t": t, "bar_t": bar_t}
    )
    if candidates:
        distinguisher = Distinguisher(model, base, cap_tests=cap_tests)
        for index, members in enumerate(distinguisher.classes(candidates)):
            result.classes.append(CandidateClass(index, members, failing))
    logger.info(
        "%d candidate sets in %d classes for %d failing rows",
        len(candidates), len(result.classes), len(failing),
    )
    return result
