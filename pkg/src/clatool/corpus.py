"""Seeded random models and arrays for property checks."""

from __future__ import annotations

import numpy as np

from clatool.array import TestArray
from clatool.constraints import And, Atom, ConstraintExpr, Implies, Not, Or, Polarity
from clatool.enumeration import enumerate_valid_tests, is_satisfiable
from clatool.errors import GenerationError
from clatool.model import Factor, SutModel
from clatool.utils import seeded_rng

MAX_ATTEMPTS = 100


def random_model(
    seed: int,
    *,
    max_factors: int = 6,
    max_values: int = 3,
    max_constraints: int = 5,
    constrained: bool = True,
) -> SutModel:
    """A satisfiable model with 2..max_factors factors of 2..max_values values."""
    for attempt in range(MAX_ATTEMPTS):
        rng = seeded_rng(seed, attempt)
        k = int(rng.integers(2, max_factors + 1))
        factors = tuple(
            Factor(f"F{i + 1}", tuple(str(v) for v in range(int(rng.integers(2, max_values + 1)))))
            for i in range(k)
        )
        count = int(rng.integers(0, max_constraints + 1)) if constrained else 0
        sizes = [factor.size for factor in factors]
        constraints = tuple(_random_constraint(rng, sizes) for _ in range(count))
        model = SutModel(f"random-{seed}", factors, constraints)
        if is_satisfiable(model):
            return model
    raise GenerationError(f"no satisfiable model found for seed {seed} after {MAX_ATTEMPTS} attempts")


def _random_atom(rng: np.random.Generator, sizes: list[int], exclude: int | None = None) -> Atom:
    choices = [f for f in range(len(sizes)) if f != exclude]
    f = int(rng.choice(choices))
    polarity = Polarity.EQUALS if rng.random() < 0.7 else Polarity.NOT_EQUALS
    return Atom(f, int(rng.integers(sizes[f])), polarity)


def _random_constraint(rng: np.random.Generator, sizes: list[int]) -> ConstraintExpr:
    first = _random_atom(rng, sizes)
    second = _random_atom(rng, sizes, exclude=first.factor)
    shape = int(rng.integers(3))
    if shape == 0:
        return Implies(first, second)
    if shape == 1:
        return Not(And((first, second)))
    return Or((first, second))


def exhaustive_array(model: SutModel, cap: int) -> TestArray:
    tests = enumerate_valid_tests(model, cap)
    return TestArray(model, np.array(tests, dtype=np.int32).reshape(len(tests), model.k))


def random_subarray(array: TestArray, rng: np.random.Generator, size: int | None = None) -> TestArray:
    """Distinct rows of ``array`` in random order."""
    n = len(array)
    if size is None:
        size = int(rng.integers(0, n + 1))
    picks = rng.choice(n, size=min(size, n), replace=False) if n else []
    return array.subarray(int(i) for i in picks)
