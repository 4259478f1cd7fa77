"""Backtracking search for valid tests covering one interaction and avoiding others."""

from __future__ import annotations

import logging
from collections import defaultdict
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np

from clatool.model import EMPTY_INTERACTION, Interaction, Row, SutModel

logger = logging.getLogger(__name__)


def _value_order(size: int, rng: Optional[np.random.Generator]) -> tuple[int, ...]:
    if rng is None:
        return tuple(range(size))
    return tuple(int(v) for v in rng.permutation(size))


class ValidTestSearch:
    """Depth-first search over factor assignments.

    Factors fixed by ``cover`` are assigned first, the rest in declaration order.
    Values are tried in ascending order, or in a per-factor shuffled order drawn
    from ``rng``. A branch is cut as soon as a constraint line evaluates to false
    under three-valued evaluation or an ``avoid`` interaction becomes fully
    covered. With ``forward_check`` the domains of unassigned
    factors sharing a constraint line or avoid interaction with the assigned one
    are filtered too, and a branch dies when any domain empties.

    Without a cover or ``rng``, iteration yields valid tests in lexicographic order.
    """

    def __init__(
        self,
        model: SutModel,
        cover: Interaction = EMPTY_INTERACTION,
        avoid: Iterable[Interaction] = (),
        *,
        forward_check: bool = True,
        rng: Optional[np.random.Generator] = None,
    ):
        model.check_interaction(cover)
        self.model = model
        self.avoid = list(avoid)
        for interaction in self.avoid:
            model.check_interaction(interaction)
        self.forward_check = forward_check

        fixed = dict(cover.pairs)
        self.order = sorted(fixed) + [f for f in range(model.k) if f not in fixed]
        self.domains: list[tuple[int, ...]] = [
            (fixed[f],) if f in fixed else _value_order(size, rng)
            for f, size in enumerate(model.domain_sizes)
        ]

        self._avoid_by_factor: list[list[Interaction]] = [[] for _ in range(model.k)]
        for interaction in self.avoid:
            for f in interaction.factors:
                self._avoid_by_factor[f].append(interaction)

        self._shared_lines: list[dict[int, list[int]]] = [defaultdict(list) for _ in range(model.k)]
        self._shared_avoid: list[dict[int, list[Interaction]]] = [
            defaultdict(list) for _ in range(model.k)
        ]
        if forward_check:
            for index, factors in enumerate(model.constraint_factors):
                for f in factors:
                    for g in factors:
                        if g != f:
                            self._shared_lines[f][g].append(index)
            for interaction in self.avoid:
                for f in interaction.factors:
                    for g in interaction.factors:
                        if g != f:
                            self._shared_avoid[f][g].append(interaction)

    def __iter__(self) -> Iterator[Row]:
        if any(interaction.strength == 0 for interaction in self.avoid):
            return iter(())
        return self._descend(0, [None] * self.model.k, self.domains)

    def first(self) -> Optional[Row]:
        return next(iter(self), None)

    def _descend(
        self, pos: int, assignment: list, domains: Sequence[tuple[int, ...]]
    ) -> Iterator[Row]:
        if pos == len(self.order):
            yield tuple(assignment)
            return
        f = self.order[pos]
        for value in domains[f]:
            assignment[f] = value
            if self._consistent(f, assignment):
                next_domains = self._forward(f, assignment, domains) if self.forward_check else domains
                if next_domains is not None:
                    yield from self._descend(pos + 1, assignment, next_domains)
        assignment[f] = None

    def _consistent(self, f: int, assignment: list) -> bool:
        constraints = self.model.constraints
        for index in self.model.watchers[f]:
            if constraints[index].partial(assignment) is False:
                return False
        for interaction in self._avoid_by_factor[f]:
            if all(assignment[g] == v for g, v in interaction.pairs):
                return False
        return True

    def _forward(
        self, f: int, assignment: list, domains: Sequence[tuple[int, ...]]
    ) -> Optional[list[tuple[int, ...]]]:
        constraints = self.model.constraints
        shared_lines = self._shared_lines[f]
        shared_avoid = self._shared_avoid[f]
        updated: Optional[list[tuple[int, ...]]] = None
        for g in set(shared_lines) | set(shared_avoid):
            if assignment[g] is not None:
                continue
            kept = []
            for value in domains[g]:
                assignment[g] = value
                ok = all(constraints[i].partial(assignment) is not False for i in shared_lines.get(g, ()))
                if ok:
                    ok = not any(
                        all(assignment[h] == w for h, w in interaction.pairs)
                        for interaction in shared_avoid.get(g, ())
                    )
                if ok:
                    kept.append(value)
            assignment[g] = None
            if not kept:
                return None
            if len(kept) != len(domains[g]):
                if updated is None:
                    updated = list(domains)
                updated[g] = tuple(kept)
        return updated if updated is not None else domains


def find_valid_test(
    model: SutModel,
    cover: Interaction = EMPTY_INTERACTION,
    avoid: Iterable[Interaction] = (),
) -> Optional[Row]:
    """Some valid test covering ``cover`` and no member of ``avoid``, or None."""
    return ValidTestSearch(model, cover, avoid).first()


def is_valid_interaction(model: SutModel, interaction: Interaction) -> bool:
    return find_valid_test(model, interaction) is not None
