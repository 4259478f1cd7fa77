"""Brute-force verifiers for covering, constrained locating and locating arrays."""

from __future__ import annotations

import itertools
import logging
import math
from collections import defaultdict
from typing import Optional

import numpy as np

from clatool.array import TestArray
from clatool.distinguish import (
    DEFAULT_CAP_UNIVERSE,
    Distinguisher,
    base_interactions,
    interaction_set_universe,
)
from clatool.enumeration import DEFAULT_CAP_TESTS, Mode, enumerate_valid_tests, valid_interactions
from clatool.errors import BudgetExceededError, InputError
from clatool.model import SutModel
from clatool.reports import VerificationReport, Witness

logger = logging.getLogger(__name__)

WITNESS_LIMIT = 100
DEFAULT_ORACLE_BUDGET = 2_000_000


def _params(d: Optional[int], t: int, bar_d: bool = False, bar_t: bool = False) -> dict:
    if d is None:
        return {"t": t}
    return {"d": d, "bar_d": bar_d, "t": t, "bar_t": bar_t}


def _check_rows(model: SutModel, array: TestArray, report: VerificationReport, limit: int) -> bool:
    invalid = array.invalid_rows()
    for row in invalid:
        report.add_witness(Witness("invalid-row", f"row {row} violates constraints", [row]), limit)
    duplicates = array.duplicate_rows()
    if duplicates:
        report.warnings.append(
            "duplicate rows: " + " ".join(str(row) for row in duplicates[:limit])
        )
    return not invalid


def verify_cca(
    model: SutModel,
    array: TestArray,
    t: int,
    *,
    cap_tests: int = DEFAULT_CAP_TESTS,
    witness_limit: int = WITNESS_LIMIT,
) -> VerificationReport:
    """Every row valid and every valid t-way interaction covered."""
    if not 1 <= t <= model.k:
        raise InputError(f"strength {t} out of range 1..{model.k}")
    report = VerificationReport("cca", _params(None, t), passed=False, rows=len(array))
    rows_ok = _check_rows(model, array, report, witness_limit)
    targets = valid_interactions(model, t, Mode.EXACT, cap_tests)
    report.checked = len(targets)
    for interaction in targets:
        if array.interaction_bits(interaction) == 0:
            report.add_witness(
                Witness("uncovered", f"{model.describe(interaction)} is not covered"), witness_limit
            )
    report.passed = rows_ok and report.violations == 0
    return report


def verify_cla(
    model: SutModel,
    array: TestArray,
    d: int,
    t: int,
    bar_d: bool = False,
    bar_t: bool = False,
    *,
    cap_tests: int = DEFAULT_CAP_TESTS,
    cap_universe: int = DEFAULT_CAP_UNIVERSE,
    witness_limit: int = WITNESS_LIMIT,
) -> VerificationReport:
    """Distinct row sets for every distinguishable pair of the (d, t) universe."""
    _check_parameters(model, d, t)
    report = VerificationReport("cla", _params(d, t, bar_d, bar_t), passed=False, rows=len(array))
    if not _check_rows(model, array, report, witness_limit):
        return report
    if d == 0:
        report.degenerate = True
        report.passed = True
        return report

    base = base_interactions(model, t, bar_t, cap_tests=cap_tests)
    universe = interaction_set_universe(
        base, d, bar_d=bar_d, independent_only=bar_t, cap=cap_universe
    )
    report.checked = len(universe)
    distinguisher = Distinguisher(model, base, cap_tests=cap_tests)
    for bucket in _buckets(array, universe):
        for a, b in distinguisher.distinguishable_within(bucket):
            rows = sorted(set(_rows_of(array, a)))
            report.add_witness(
                Witness(
                    "collision",
                    f"{model.describe_set(a)} and {model.describe_set(b)} share rows {rows}",
                    rows,
                ),
                witness_limit,
            )
    report.passed = report.violations == 0
    logger.debug("CLA check over %d sets: %d violations", len(universe), report.violations)
    return report


def verify_la(
    model: SutModel,
    array: TestArray,
    d: int,
    t: int,
    bar_d: bool = False,
    bar_t: bool = False,
    *,
    cap_universe: int = DEFAULT_CAP_UNIVERSE,
    witness_limit: int = WITNESS_LIMIT,
) -> VerificationReport:
    """Distinct row sets for every pair of distinct sets of syntactic interactions."""
    _check_parameters(model, d, t)
    report = VerificationReport("la", _params(d, t, bar_d, bar_t), passed=False, rows=len(array))
    if d == 0:
        report.degenerate = True
        report.passed = True
        return report
    base = base_interactions(model, t, bar_t, syntactic=True)
    universe = interaction_set_universe(
        base, d, bar_d=bar_d, independent_only=bar_t, cap=cap_universe
    )
    report.checked = len(universe)
    for bucket in _buckets(array, universe):
        for a, b in itertools.combinations(bucket, 2):
            rows = sorted(set(_rows_of(array, a)))
            report.add_witness(
                Witness(
                    "collision",
                    f"{model.describe_set(a)} and {model.describe_set(b)} share rows {rows}",
                    rows,
                ),
                witness_limit,
            )
    report.passed = report.violations == 0
    return report


def _check_parameters(model: SutModel, d: int, t: int) -> None:
    if d < 0:
        raise InputError(f"d must be non-negative, got {d}")
    if not 0 <= t <= model.k:
        raise InputError(f"strength {t} out of range 0..{model.k}")


def _rows_of(array: TestArray, ts: frozenset) -> list[int]:
    bits = _set_bits(array, ts)
    return [row for row in range(len(array)) if bits >> row & 1]


def _buckets(array: TestArray, universe: list[frozenset]) -> list[list[frozenset]]:
    """Universe sets grouped by identical row set, groups of two or more only."""
    cache: dict = {}
    groups: dict[int, list[frozenset]] = defaultdict(list)
    for ts in universe:
        bits = 0
        for member in ts:
            member_bits = cache.get(member)
            if member_bits is None:
                member_bits = cache[member] = array.interaction_bits(member)
            bits |= member_bits
        groups[bits].append(ts)
    return [members for members in groups.values() if len(members) > 1]


def minimal_cla_size(
    model: SutModel,
    d: int,
    t: int,
    bar_d: bool = False,
    bar_t: bool = False,
    budget: int = DEFAULT_ORACLE_BUDGET,
    *,
    cap_tests: int = DEFAULT_CAP_TESTS,
    cap_universe: int = DEFAULT_CAP_UNIVERSE,
) -> tuple[int, TestArray]:
    """Smallest CLA over subsets of the valid tests, by ascending exhaustive search.

    Sets in the universe are grouped by the valid tests covering them; a subset
    of rows is a CLA exactly when it keeps every group's row set distinct.
    """
    _check_parameters(model, d, t)
    tests = enumerate_valid_tests(model, cap_tests)
    exhaustive = TestArray(model, np.array(tests, dtype=np.int32).reshape(len(tests), model.k))
    if d == 0:
        return 0, exhaustive.subarray([])
    base = base_interactions(model, t, bar_t, cap_tests=cap_tests)
    universe = interaction_set_universe(
        base, d, bar_d=bar_d, independent_only=bar_t, cap=cap_universe
    )
    signatures = sorted(
        {_set_bits(exhaustive, ts) for ts in universe}
    )
    examined = 0
    for n in range(len(tests) + 1):
        count = math.comb(len(tests), n)
        if examined + count > budget:
            raise BudgetExceededError(
                f"minimal size search needs more than {budget} subsets (reached size {n})"
            )
        examined += count
        for subset in itertools.combinations(range(len(tests)), n):
            mask = 0
            for index in subset:
                mask |= 1 << index
            if len({signature & mask for signature in signatures}) == len(signatures):
                logger.info("Minimal CLA size %d after %d subsets", n, examined)
                return n, exhaustive.subarray(subset)
    raise AssertionError("the exhaustive array is always a CLA")


def _set_bits(array: TestArray, ts: frozenset) -> int:
    bits = 0
    for member in ts:
        bits |= array.interaction_bits(member)
    return bits
