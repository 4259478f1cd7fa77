"""Row-deletion reduction of a (t+1)-CCA into a (1̄,t̄)-CLA.

Rows are visited once each in a seeded random order. A row is deleted when,
for every valid t-way interaction it covers, the interaction keeps at least one
covering row and its shrunken row set does not collide with the row set of any
other interaction. Row sets are integer bitmasks; interactions are grouped by
row set so the collision test is a dictionary lookup.
"""

from __future__ import annotations

import logging
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor, as_completed
from typing import Callable, Iterable, Mapping, Optional, Sequence, Union

import numpy as np
from tqdm import tqdm

from clatool.array import RowSet, TestArray
from clatool.enumeration import DEFAULT_CAP_TESTS, interactions_of, iter_interactions
from clatool.errors import InputError, PreconditionError
from clatool.model import Interaction, SutModel, canonical_members
from clatool.reports import ReductionReport, RowVerdict
from clatool.solver import find_valid_test
from clatool.utils import seeded_rng

logger = logging.getLogger(__name__)

DEFAULT_RUNS = 10
DEFAULT_SPOT_CHECKS = 200


class CoverageMap:
    """Row set of every interaction in a fixed domain, maintained under row deletion."""

    def __init__(
        self,
        signatures: Mapping[Interaction, Union[RowSet, int]],
        describe: Optional[Callable[[Interaction], str]] = None,
    ):
        self._sig: dict[Interaction, int] = {}
        self._groups: dict[int, set[Interaction]] = defaultdict(set)
        self._by_row: dict[int, list[Interaction]] = defaultdict(list)
        self._describe = describe or repr
        for interaction, rows in signatures.items():
            bits = rows.bits if isinstance(rows, RowSet) else int(rows)
            self._sig[interaction] = bits
            self._groups[bits].add(interaction)
            for row in RowSet(bits):
                self._by_row[row].append(interaction)

    def __getitem__(self, interaction: Interaction) -> RowSet:
        return RowSet(self._sig[interaction])

    def __contains__(self, interaction: Interaction) -> bool:
        return interaction in self._sig

    def __len__(self) -> int:
        return len(self._sig)

    def domain(self) -> list[Interaction]:
        return canonical_members(self._sig)

    def as_dict(self) -> dict[Interaction, RowSet]:
        return {interaction: RowSet(bits) for interaction, bits in self._sig.items()}

    def interactions_at(self, row: int) -> list[Interaction]:
        """Domain interactions covered by a row that has not been removed."""
        return self._by_row.get(row, [])

    def removal_blocker(self, row: int) -> Optional[str]:
        """Why removing ``row`` would break the locating conditions, or None."""
        mask = ~(1 << row)
        for interaction in self.interactions_at(row):
            shrunk = self._sig[interaction] & mask
            if shrunk == 0:
                return f"would uncover {self._describe(interaction)}"
            clash = self._groups.get(shrunk)
            if clash:
                other = canonical_members(clash)[0]
                return f"would merge {self._describe(interaction)} with {self._describe(other)}"
        return None

    def remove_row(self, row: int) -> None:
        mask = ~(1 << row)
        for interaction in self._by_row.pop(row, []):
            old = self._sig[interaction]
            group = self._groups[old]
            group.discard(interaction)
            if not group:
                del self._groups[old]
            new = old & mask
            self._sig[interaction] = new
            self._groups[new].add(interaction)


def build_coverage_map(array: TestArray, vi_t: Iterable[Interaction]) -> CoverageMap:
    """Map each given interaction to the rows of ``array`` covering it."""
    return CoverageMap(
        {interaction: array.interaction_bits(interaction) for interaction in vi_t},
        describe=array.model.describe,
    )


def reduce_rows(coverage: CoverageMap, order: Sequence[int]) -> list[RowVerdict]:
    """Visit rows in ``order``, deleting each one whose removal is safe."""
    verdicts = []
    for row in order:
        blocker = coverage.removal_blocker(row)
        if blocker is None:
            coverage.remove_row(row)
            verdicts.append(RowVerdict(int(row), True))
        else:
            verdicts.append(RowVerdict(int(row), False, blocker))
    return verdicts


def check_cca_precondition(
    model: SutModel, cca: TestArray, strength: int, seed: int = 0, spot_checks: int = DEFAULT_SPOT_CHECKS
) -> None:
    """Reject arrays with invalid rows or a sampled valid interaction left uncovered."""
    invalid = cca.invalid_rows()
    if invalid:
        raise PreconditionError(f"input row {invalid[0]} violates the constraints")
    uncovered = [
        interaction
        for interaction in iter_interactions(model, strength)
        if cca.interaction_bits(interaction) == 0
    ]
    if len(uncovered) > spot_checks:
        rng = seeded_rng(seed, 1)
        picks = sorted(rng.choice(len(uncovered), size=spot_checks, replace=False))
        uncovered = [uncovered[i] for i in picks]
    for interaction in uncovered:
        if find_valid_test(model, interaction) is not None:
            raise PreconditionError(
                f"input is not a {strength}-CCA: valid interaction "
                f"{model.describe(interaction)} is not covered"
            )


def reduce_to_cla(
    model: SutModel,
    cca: TestArray,
    t: int,
    seed: int = 0,
    *,
    run: int = 0,
    check: bool = True,
    spot_checks: int = DEFAULT_SPOT_CHECKS,
) -> tuple[TestArray, ReductionReport]:
    """Delete redundant rows of a (t+1)-CCA; the result is a (1̄,t̄)-CLA."""
    if not 1 <= t < model.k:
        raise InputError(f"strength {t} out of range 1..{model.k - 1}")
    if check:
        check_cca_precondition(model, cca, t + 1, seed, spot_checks)

    vi_t: set[Interaction] = set()
    for row in cca:
        vi_t.update(interactions_of(row, t))
    coverage = build_coverage_map(cca, vi_t)

    order = [int(i) for i in seeded_rng(seed, 0, run).permutation(len(cca))]
    verdicts = reduce_rows(coverage, order)
    deleted = [verdict.row for verdict in verdicts if verdict.deleted]
    kept = sorted(set(range(len(cca))) - set(deleted))
    report = ReductionReport(
        t=t,
        seed=seed,
        run=run,
        input_size=len(cca),
        output_size=len(kept),
        deletion_order=deleted,
        verdicts=sorted(verdicts, key=lambda verdict: verdict.row),
    )
    logger.debug("Run %d: %d -> %d rows", run, len(cca), len(kept))
    return cca.subarray(kept), report


def _reduce_worker(model: SutModel, rows: np.ndarray, t: int, seed: int, run: int) -> tuple[np.ndarray, ReductionReport]:
    """Standalone worker for parallel runs (must be picklable)."""
    array, report = reduce_to_cla(model, TestArray(model, rows), t, seed, run=run, check=False)
    return array.rows, report


def reduce_runs(
    model: SutModel,
    cca: TestArray,
    t: int,
    seed: int = 0,
    *,
    runs: int = DEFAULT_RUNS,
    workers: int = 1,
    progress: bool = False,
    spot_checks: int = DEFAULT_SPOT_CHECKS,
) -> tuple[TestArray, ReductionReport]:
    """Run independent row orders and keep the smallest result (first on ties)."""
    if runs < 1:
        raise InputError(f"runs must be at least 1, got {runs}")
    check_cca_precondition(model, cca, t + 1, seed, spot_checks)

    results: dict[int, tuple[np.ndarray, ReductionReport]] = {}
    if workers > 1 and runs > 1:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            futures = {
                executor.submit(_reduce_worker, model, np.asarray(cca.rows), t, seed, run): run
                for run in range(runs)
            }
            with tqdm(total=runs, desc="Reducing", unit="run", disable=not progress) as pbar:
                for future in as_completed(futures):
                    results[futures[future]] = future.result()
                    pbar.update(1)
    else:
        for run in tqdm(range(runs), desc="Reducing", unit="run", disable=not progress):
            results[run] = _reduce_worker(model, np.asarray(cca.rows), t, seed, run)

    sizes = [results[run][1].output_size for run in range(runs)]
    best = min(range(runs), key=lambda run: (sizes[run], run))
    rows, report = results[best]
    report.run_sizes = sizes
    logger.info("Best of %d runs: %d -> %d rows (run %d)", runs, len(cca), sizes[best], best)
    return TestArray(model, rows), report
