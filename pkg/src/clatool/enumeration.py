"""Valid tests, interactions of a test, and valid/invalid interaction sets."""

from __future__ import annotations

import itertools
import logging
from enum import Enum
from functools import lru_cache
from typing import Iterable, Iterator

from clatool.constraints import relabel
from clatool.errors import CapExceededError, InputError
from clatool.model import EMPTY_INTERACTION, Interaction, Row, SutModel
from clatool.solver import ValidTestSearch, find_valid_test
from clatool.utils import seeded_rng

logger = logging.getLogger(__name__)

DEFAULT_CAP_TESTS = 1_000_000
# Constraint components with more syntactic tests than this are probed, not enumerated.
COMPONENT_ENUMERATION_LIMIT = 4096


class Mode(Enum):
    EXACT = "exact"
    UP_TO = "up-to"


def enumerate_valid_tests(model: SutModel, cap: int = DEFAULT_CAP_TESTS) -> list[Row]:
    """All valid tests in lexicographic order."""
    if cap <= 0:
        raise InputError(f"cap must be positive, got {cap}")
    return list(_valid_tests(model, cap))


@lru_cache(maxsize=8)
def _valid_tests(model: SutModel, cap: int) -> tuple[Row, ...]:
    tests = []
    for row in ValidTestSearch(model, forward_check=False):
        tests.append(row)
        if len(tests) > cap:
            raise CapExceededError(
                f"enumeration too large: model '{model.name}' has more than {cap} valid tests"
            )
    logger.debug("Enumerated %d valid tests of model '%s'", len(tests), model.name)
    return tuple(tests)


def interactions_of(row: Row, t: int) -> list[Interaction]:
    """All strength-t sub-assignments of a test."""
    if not 0 <= t <= len(row):
        raise InputError(f"strength {t} out of range 0..{len(row)}")
    return [
        Interaction(tuple((f, row[f]) for f in factors))
        for factors in itertools.combinations(range(len(row)), t)
    ]


def _strengths(t: int, mode: Mode) -> range:
    return range(0, t + 1) if mode is Mode.UP_TO else range(t, t + 1)


def iter_interactions(model: SutModel, t: int) -> Iterator[Interaction]:
    """Every syntactic t-way interaction, factor combinations first."""
    sizes = model.domain_sizes
    for factors in itertools.combinations(range(model.k), t):
        for values in itertools.product(*(range(sizes[f]) for f in factors)):
            yield Interaction(tuple(zip(factors, values)))


def all_interactions(model: SutModel, t: int, mode: Mode = Mode.EXACT) -> list[Interaction]:
    """The syntactic interaction space, ignoring constraints."""
    _check_strength(model, t)
    result = []
    for strength in _strengths(t, mode):
        result.extend(iter_interactions(model, strength))
    return result


def valid_interactions(
    model: SutModel,
    t: int,
    mode: Mode = Mode.EXACT,
    cap: int = DEFAULT_CAP_TESTS,
) -> list[Interaction]:
    """Valid interactions of strength t (or at most t), in canonical order.

    Enumerates the valid tests when the syntactic test space fits under ``cap``.
    Otherwise the factors are split into constraint components and an interaction
    is valid when its restriction to each component is. Components too large to
    enumerate are probed with the search, skipping interactions already covered
    by an earlier witness test.
    """
    _check_strength(model, t)
    return list(_valid_interactions(model, t, mode, cap))


@lru_cache(maxsize=32)
def _valid_interactions(model: SutModel, t: int, mode: Mode, cap: int) -> tuple[Interaction, ...]:
    if model.space_size <= cap:
        rows: Iterable[Row] = _valid_tests(model, cap)
    elif not is_satisfiable(model):
        return ()
    else:
        components = constraint_components(model)
        if components != [tuple(range(model.k))]:
            return _valid_by_component(model, components, t, mode, cap)
        logger.debug("Probing interactions of '%s' (space %d > cap %d)", model.name, model.space_size, cap)
        rows = probe_witnesses(model, all_interactions(model, t, mode))
    found: set[Interaction] = set()
    for row in rows:
        for strength in _strengths(t, mode):
            found.update(interactions_of(row, strength))
    return tuple(sorted(found, key=lambda interaction: interaction.sort_key))


def constraint_components(model: SutModel) -> list[tuple[int, ...]]:
    """Groups of factors linked through shared constraint lines.

    Factors that no constraint line reads belong to no group.
    """
    parent = list(range(model.k))

    def find(f: int) -> int:
        while parent[f] != f:
            parent[f] = parent[parent[f]]
            f = parent[f]
        return f

    touched: set[int] = set()
    for factors in model.constraint_factors:
        ordered = sorted(factors)
        touched.update(ordered)
        for g in ordered[1:]:
            parent[find(g)] = find(ordered[0])
    groups: dict[int, list[int]] = {}
    for f in sorted(touched):
        groups.setdefault(find(f), []).append(f)
    return sorted(tuple(group) for group in groups.values())


def component_model(model: SutModel, factors: tuple[int, ...]) -> SutModel:
    """The model restricted to ``factors`` and the constraint lines reading only them.

    Factor i of the result is ``factors[i]`` of ``model``.
    """
    mapping = {f: i for i, f in enumerate(factors)}
    members = set(factors)
    lines = tuple(
        relabel(expr, mapping)
        for expr, used in zip(model.constraints, model.constraint_factors)
        if used and used <= members
    )
    name = f"{model.name}[{','.join(str(f) for f in factors)}]"
    return SutModel(name, tuple(model.factors[f] for f in factors), lines)


def _valid_by_component(
    model: SutModel,
    components: list[tuple[int, ...]],
    t: int,
    mode: Mode,
    cap: int,
) -> tuple[Interaction, ...]:
    # Requires a satisfiable model: every component then has a valid completion.
    owner: dict[int, int] = {}
    local_valid: list[set[tuple[tuple[int, int], ...]]] = []
    for index, factors in enumerate(components):
        local = _valid_interactions(
            component_model(model, factors),
            min(t, len(factors)),
            Mode.UP_TO,
            min(cap, COMPONENT_ENUMERATION_LIMIT),
        )
        local_valid.append({tuple((factors[f], v) for f, v in item.pairs) for item in local})
        for f in factors:
            owner[f] = index
    logger.debug(
        "Split '%s' into %d constraint components (largest %d factors)",
        model.name, len(components), max((len(factors) for factors in components), default=0),
    )

    found = []
    for interaction in all_interactions(model, t, mode):
        parts: dict[int, list[tuple[int, int]]] = {}
        for f, v in interaction.pairs:
            index = owner.get(f)
            if index is not None:
                parts.setdefault(index, []).append((f, v))
        if all(tuple(pairs) in local_valid[index] for index, pairs in parts.items()):
            found.append(interaction)
    return tuple(sorted(found, key=lambda interaction: interaction.sort_key))


def probe_witnesses(model: SutModel, interactions: Iterable[Interaction], seed: int = 0) -> list[Row]:
    """Valid tests such that every valid interaction given is covered by one of them.

    Factors outside the probed interaction take values in a seeded random order.
    """
    rng = seeded_rng(seed, 2)
    witnesses: list[Row] = []
    covered: set[Interaction] = set()
    strengths: set[int] = set()
    for interaction in interactions:
        if interaction in covered:
            continue
        row = ValidTestSearch(model, interaction, rng=rng).first()
        if row is None:
            continue
        witnesses.append(row)
        strengths.add(interaction.strength)
        for strength in strengths:
            covered.update(interactions_of(row, strength))
    logger.debug("Probed '%s' with %d witness tests", model.name, len(witnesses))
    return witnesses


def invalid_interactions(model: SutModel, t: int, cap: int = DEFAULT_CAP_TESTS) -> list[Interaction]:
    valid = set(valid_interactions(model, t, Mode.EXACT, cap))
    return [interaction for interaction in iter_interactions(model, t) if interaction not in valid]


def valid_tests_or_none(model: SutModel, cap: int = DEFAULT_CAP_TESTS) -> list[Row] | None:
    """The valid tests when the test space fits under ``cap``, else None."""
    if model.space_size > cap:
        return None
    return enumerate_valid_tests(model, cap)


def is_satisfiable(model: SutModel) -> bool:
    return find_valid_test(model, EMPTY_INTERACTION) is not None


def _check_strength(model: SutModel, t: int) -> None:
    if not 0 <= t <= model.k:
        raise InputError(f"strength {t} out of range 0..{model.k}")
