"""Distinguishability and independence of interaction sets.

Two interaction sets are distinguishable when some valid test covers a member of
one of them and no member of the other. ``Distinguisher`` answers that question
for many pairs at once: it fingerprints every set by the rows of a witness array
of valid tests it covers. Different fingerprints already prove distinguishability
since the witness rows are valid tests. Equal fingerprints are decisive when the
witness array holds every valid test, and fall back to search probes otherwise.
"""

from __future__ import annotations

import itertools
import logging
import math
from collections import defaultdict
from typing import Iterable, Sequence

from clatool.array import TestArray
from clatool.enumeration import (
    DEFAULT_CAP_TESTS,
    Mode,
    all_interactions,
    probe_witnesses,
    valid_interactions,
    valid_tests_or_none,
)
from clatool.errors import CapExceededError, InputError
from clatool.model import Interaction, SutModel, set_sort_key
from clatool.solver import find_valid_test

logger = logging.getLogger(__name__)

DEFAULT_CAP_UNIVERSE = 20_000

InteractionSetPair = tuple[frozenset, frozenset]


def independent(ts: Iterable[Interaction]) -> bool:
    """True when no member strictly contains another."""
    members = [set(member.pairs) for member in ts]
    for a, b in itertools.permutations(members, 2):
        if a < b:
            return False
    return True


def distinguishable(model: SutModel, ts1: Iterable[Interaction], ts2: Iterable[Interaction]) -> bool:
    """Whether some valid test covers a member of exactly one of the two sets."""
    first, second = frozenset(ts1), frozenset(ts2)
    if first == second:
        return False
    for cover, avoid in ((first, second), (second, first)):
        for member in sorted(cover, key=lambda interaction: interaction.sort_key):
            if find_valid_test(model, member, avoid) is not None:
                return True
    return False


def base_interactions(
    model: SutModel, t: int, bar_t: bool, *, cap_tests: int = DEFAULT_CAP_TESTS, syntactic: bool = False
) -> list[Interaction]:
    """VI_t or the valid interactions of strength at most t; I_t variants when ``syntactic``."""
    mode = Mode.UP_TO if bar_t else Mode.EXACT
    if syntactic:
        return all_interactions(model, t, mode)
    return valid_interactions(model, t, mode, cap_tests)


def universe_size(n: int, d: int, bar_d: bool) -> int:
    sizes = range(0, d + 1) if bar_d else (d,)
    return sum(math.comb(n, size) for size in sizes)


def interaction_set_universe(
    interactions: Sequence[Interaction],
    d: int,
    *,
    bar_d: bool,
    independent_only: bool,
    cap: int = DEFAULT_CAP_UNIVERSE,
) -> list[frozenset]:
    """Sets of exactly d (or at most d) interactions drawn from ``interactions``."""
    if d < 0:
        raise InputError(f"d must be non-negative, got {d}")
    total = universe_size(len(interactions), d, bar_d)
    if total > cap:
        raise CapExceededError(
            f"too large to verify: interaction-set universe has {total} sets, cap is {cap}"
        )
    ordered = sorted(interactions, key=lambda interaction: interaction.sort_key)
    sizes = range(0, d + 1) if bar_d else (d,)
    universe = []
    for size in sizes:
        for combo in itertools.combinations(ordered, size):
            if independent_only and size > 1 and not independent(combo):
                continue
            universe.append(frozenset(combo))
    return universe


class Distinguisher:
    """Batched distinguishability over a fixed base of interactions."""

    def __init__(
        self,
        model: SutModel,
        interactions: Iterable[Interaction],
        *,
        cap_tests: int = DEFAULT_CAP_TESTS,
    ):
        self.model = model
        rows = valid_tests_or_none(model, cap_tests)
        self.exact = rows is not None
        if rows is None:
            rows = probe_witnesses(model, interactions)
        self.witnesses = TestArray(model, rows)
        self._bits: dict[Interaction, int] = {}
        logger.debug(
            "Distinguisher over %d witness tests (exact=%s)", len(self.witnesses), self.exact
        )

    def fingerprint(self, ts: Iterable[Interaction]) -> int:
        bits = 0
        for member in ts:
            cached = self._bits.get(member)
            if cached is None:
                cached = self._bits[member] = self.witnesses.interaction_bits(member)
            bits |= cached
        return bits

    def distinguishable(self, ts1: frozenset, ts2: frozenset) -> bool:
        if ts1 == ts2:
            return False
        if self.fingerprint(ts1) != self.fingerprint(ts2):
            return True
        if self.exact:
            return False
        return distinguishable(self.model, ts1, ts2)

    def indistinguishable_within(self, sets: Sequence[frozenset]) -> list[InteractionSetPair]:
        """Unordered indistinguishable pairs among ``sets``."""
        groups: dict[int, list[frozenset]] = defaultdict(list)
        for ts in sets:
            groups[self.fingerprint(ts)].append(ts)
        pairs = []
        for members in groups.values():
            for a, b in itertools.combinations(members, 2):
                if self.exact or not distinguishable(self.model, a, b):
                    pairs.append(canonical_pair(a, b))
        return sorted(pairs, key=lambda pair: (set_sort_key(pair[0]), set_sort_key(pair[1])))

    def distinguishable_within(self, sets: Sequence[frozenset]) -> list[InteractionSetPair]:
        """Unordered distinguishable pairs among ``sets``."""
        pairs = []
        for a, b in itertools.combinations(sets, 2):
            if self.distinguishable(a, b):
                pairs.append(canonical_pair(a, b))
        return sorted(pairs, key=lambda pair: (set_sort_key(pair[0]), set_sort_key(pair[1])))

    def classes(self, sets: Sequence[frozenset]) -> list[list[frozenset]]:
        """Partition ``sets`` into classes of mutually indistinguishable sets."""
        classes: list[list[frozenset]] = []
        for ts in sorted(sets, key=set_sort_key):
            for members in classes:
                if not self.distinguishable(members[0], ts):
                    members.append(ts)
                    break
            else:
                classes.append([ts])
        return classes


def canonical_pair(a: frozenset, b: frozenset) -> InteractionSetPair:
    return (a, b) if set_sort_key(a) <= set_sort_key(b) else (b, a)


def indistinguishable_pairs(
    model: SutModel,
    d: int,
    t: int,
    bar_d: bool = False,
    bar_t: bool = False,
    *,
    cap_tests: int = DEFAULT_CAP_TESTS,
    cap_universe: int = DEFAULT_CAP_UNIVERSE,
) -> list[InteractionSetPair]:
    """Every unordered pair of distinct, indistinguishable sets in the universe."""
    if d < 1:
        raise InputError(f"d must be at least 1, got {d}")
    if not 1 <= t <= model.k:
        raise InputError(f"strength {t} out of range 1..{model.k}")
    base = base_interactions(model, t, bar_t, cap_tests=cap_tests)
    universe = interaction_set_universe(
        base, d, bar_d=bar_d, independent_only=bar_t, cap=cap_universe
    )
    distinguisher = Distinguisher(model, base, cap_tests=cap_tests)
    pairs = distinguisher.indistinguishable_within(universe)
    logger.info("%d indistinguishable pairs among %d interaction sets", len(pairs), len(universe))
    return pairs
