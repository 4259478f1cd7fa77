"""Greedy one-row-at-a-time generation of constrained covering arrays."""

from __future__ import annotations

import itertools
import logging
import math
from typing import Optional

import numpy as np

from clatool.array import TestArray
from clatool.enumeration import DEFAULT_CAP_TESTS, Mode, valid_interactions
from clatool.errors import GenerationError, InputError, UnsatisfiableModelError
from clatool.model import Interaction, Row, SutModel
from clatool.solver import find_valid_test
from clatool.utils import seeded_rng

logger = logging.getLogger(__name__)

DEFAULT_CANDIDATES = 50
DEFAULT_RETRIES = 100

Key = tuple[tuple[int, int], ...]


class _RetriesExhausted(Exception):
    pass


class CcaGenerator:
    """Covers the valid t-way interactions of a model row by row.

    Each row is the best of ``candidates`` candidate rows. A candidate starts from
    a random uncovered interaction (the nucleus), then assigns the remaining
    factors in random order, trying values that newly cover the most uncovered
    interactions first and backtracking when a constraint line becomes false.
    After ``retries`` dead ends the candidate is replaced by a solver witness
    for its nucleus.
    """

    def __init__(
        self,
        model: SutModel,
        t: int,
        seed: int = 0,
        *,
        candidates: int = DEFAULT_CANDIDATES,
        retries: int = DEFAULT_RETRIES,
        cap_tests: int = DEFAULT_CAP_TESTS,
    ):
        if not 1 <= t <= model.k:
            raise InputError(f"strength {t} out of range 1..{model.k}")
        if candidates < 1:
            raise InputError(f"candidates must be at least 1, got {candidates}")
        self.model = model
        self.t = t
        self.seed = seed
        self.candidates = candidates
        self.retries = retries
        self.cap_tests = cap_tests
        self.rng = seeded_rng(seed)

        self.uncovered: dict[Key, None] = {}
        self.by_pair: dict[tuple[int, int], set[Key]] = {}

    def generate(self) -> TestArray:
        if find_valid_test(self.model) is None:
            raise UnsatisfiableModelError(f"no valid tests exist for model '{self.model.name}'")
        targets = valid_interactions(self.model, self.t, Mode.EXACT, self.cap_tests)
        for interaction in targets:
            self._add_uncovered(interaction.pairs)
        logger.info("Covering %d valid %d-way interactions", len(targets), self.t)

        rows: list[Row] = []
        while self.uncovered:
            pool = list(self.uncovered)
            best: Optional[Row] = None
            best_score = -1
            for _ in range(self.candidates):
                nucleus = pool[int(self.rng.integers(len(pool)))]
                row = self._candidate(nucleus)
                score = self._score(row)
                if score > best_score:
                    best, best_score = row, score
            assert best is not None
            self._commit(best)
            rows.append(best)
            logger.debug("Row %d covers %d new interactions, %d left", len(rows), best_score, len(self.uncovered))
        logger.info("Generated %d-CCA with %d rows", self.t, len(rows))
        return TestArray(self.model, np.array(rows, dtype=np.int32).reshape(len(rows), self.model.k))

    def _add_uncovered(self, key: Key) -> None:
        self.uncovered[key] = None
        for pair in key:
            self.by_pair.setdefault(pair, set()).add(key)

    def _commit(self, row: Row) -> None:
        for key in self._keys_of(row):
            if key in self.uncovered:
                del self.uncovered[key]
                for pair in key:
                    self.by_pair[pair].discard(key)

    def _keys_of(self, row: Row):
        for factors in itertools.combinations(range(self.model.k), self.t):
            yield tuple((f, row[f]) for f in factors)

    def _score(self, row: Row) -> int:
        return sum(1 for key in self._keys_of(row) if key in self.uncovered)

    def _candidate(self, nucleus: Key) -> Row:
        model = self.model
        assignment: list = [None] * model.k
        for f, v in nucleus:
            assignment[f] = v
        if not all(self._consistent(f, assignment) for f, _ in nucleus):
            return self._fallback(nucleus)
        fixed = {f for f, _ in nucleus}
        rest = [f for f in range(model.k) if f not in fixed]
        order = [rest[i] for i in self.rng.permutation(len(rest))]
        placed = sorted(nucleus)
        dead_ends = [0]
        try:
            if self._descend(order, 0, assignment, placed, dead_ends):
                return tuple(assignment)
        except _RetriesExhausted:
            logger.debug("Candidate search for nucleus %s exhausted retries", nucleus)
        return self._fallback(nucleus)

    def _descend(self, order, pos, assignment, placed, dead_ends) -> bool:
        if pos == len(order):
            return True
        f = order[pos]
        size = self.model.domain_sizes[f]
        ties = self.rng.random(size)
        gains = [self._gain(f, v, assignment, placed) for v in range(size)]
        ranked = sorted(range(size), key=lambda v: (-gains[v], ties[v]))
        for v in ranked:
            assignment[f] = v
            if self._consistent(f, assignment):
                placed.append((f, v))
                if self._descend(order, pos + 1, assignment, placed, dead_ends):
                    return True
                placed.pop()
            dead_ends[0] += 1
            if dead_ends[0] > self.retries:
                assignment[f] = None
                raise _RetriesExhausted
        assignment[f] = None
        return False

    def _gain(self, f: int, v: int, assignment: list, placed: list) -> int:
        bucket = self.by_pair.get((f, v))
        if not bucket:
            return 0
        if self.t == 1:
            return 1
        if len(bucket) <= math.comb(len(placed), self.t - 1):
            return sum(
                1
                for key in bucket
                if all(g == f or assignment[g] == w for g, w in key)
            )
        count = 0
        for combo in itertools.combinations(placed, self.t - 1):
            key = tuple(sorted(combo + ((f, v),)))
            if key in self.uncovered:
                count += 1
        return count

    def _consistent(self, f: int, assignment: list) -> bool:
        constraints = self.model.constraints
        return all(constraints[i].partial(assignment) is not False for i in self.model.watchers[f])

    def _fallback(self, nucleus: Key) -> Row:
        row = find_valid_test(self.model, Interaction(nucleus))
        if row is None:
            raise GenerationError(
                f"interaction {self.model.describe(Interaction(nucleus))} was recorded as valid "
                "but no valid test covers it"
            )
        return row


def generate_cca(
    model: SutModel,
    t: int,
    seed: int = 0,
    *,
    candidates: int = DEFAULT_CANDIDATES,
    retries: int = DEFAULT_RETRIES,
    cap_tests: int = DEFAULT_CAP_TESTS,
) -> TestArray:
    """A t-CCA: valid rows covering every valid t-way interaction."""
    generator = CcaGenerator(
        model, t, seed, candidates=candidates, retries=retries, cap_tests=cap_tests
    )
    return generator.generate()
