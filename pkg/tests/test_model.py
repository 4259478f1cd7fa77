"""Tests for the SUT model, constraint evaluation and the valid-test search."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clatool.constraints import And, Atom, ConstTrue, Implies, Not, Or, Polarity, relabel
from clatool.errors import InputError
from clatool.model import EMPTY_INTERACTION, Factor, Interaction, SutModel, evaluate
from clatool.solver import ValidTestSearch, find_valid_test
from clatool.utils import seeded_rng


def _binary_model(k=2, constraints=()):
    factors = tuple(Factor(f"F{i + 1}", ("0", "1")) for i in range(k))
    return SutModel("binary", factors, tuple(constraints))


class TestSutModel:
    def test_phone_shape(self, phone):
        assert phone.k == 5
        assert phone.domain_sizes == (3, 3, 3, 2, 2)
        assert len(phone.constraints) == 7
        assert phone.space_size == 108

    def test_factor_needs_two_values(self):
        with pytest.raises(InputError, match="at least 2 values"):
            Factor("A", ("only",))

    def test_duplicate_factor_names(self):
        with pytest.raises(InputError, match="Duplicate factor"):
            SutModel("m", (Factor("A", ("0", "1")), Factor("A", ("0", "1"))))

    def test_atom_out_of_range(self):
        with pytest.raises(InputError):
            SutModel("m", (Factor("A", ("0", "1")),), (Atom(0, 5),))

    def test_without_constraints(self, phone):
        bare = phone.without_constraints()
        assert bare.constraints == ()
        assert bare.factors == phone.factors
        assert isinstance(bare.constraint, ConstTrue)

    def test_interaction_by_names(self, phone, ix):
        assert phone.interaction(Email="0", Camera="0") == ix((2, 0), (3, 0))

    def test_describe(self, phone, ix):
        assert phone.describe(ix((2, 0), (3, 0))) == "(Email=0, Camera=0)"
        assert phone.describe(EMPTY_INTERACTION) == "()"
        assert phone.describe_set(frozenset()) == "{}"


class TestInteraction:
    def test_canonical_order(self):
        assert Interaction(((3, 1), (0, 2))) == Interaction(((0, 2), (3, 1)))
        assert Interaction(((3, 1), (0, 2))).pairs == ((0, 2), (3, 1))

    def test_strength(self):
        assert EMPTY_INTERACTION.strength == 0
        assert Interaction.of((0, 1), (2, 0)).strength == 2

    def test_repeated_factor_rejected(self):
        with pytest.raises(InputError):
            Interaction(((0, 1), (0, 2)))

    def test_subset(self):
        small = Interaction.of((0, 1))
        large = Interaction.of((0, 1), (1, 0))
        assert small.issubset(large)
        assert not large.issubset(small)
        assert EMPTY_INTERACTION.issubset(small)

    @given(st.lists(st.tuples(st.integers(0, 9), st.integers(0, 3)), unique_by=lambda p: p[0]))
    @settings(max_examples=50)
    def test_same_pairs_compare_equal(self, pairs):
        assert Interaction(tuple(pairs)) == Interaction(tuple(reversed(pairs)))
        assert hash(Interaction(tuple(pairs))) == hash(Interaction(tuple(reversed(pairs))))


class TestEvaluate:
    def test_valid_phone_test(self, phone):
        assert evaluate(phone, (1, 0, 1, 1, 1)) is True

    def test_invalid_phone_test(self, phone):
        assert evaluate(phone, (1, 0, 0, 0, 1)) is False

    def test_no_constraints(self):
        model = _binary_model()
        assert all(evaluate(model, row) for row in [(0, 0), (0, 1), (1, 0), (1, 1)])

    def test_out_of_range(self, phone):
        with pytest.raises(InputError):
            evaluate(phone, (3, 0, 0, 0, 0))

    def test_wrong_arity(self, phone):
        with pytest.raises(InputError):
            evaluate(phone, (0, 0, 0))


class TestThreeValued:
    def test_atom(self):
        atom = Atom(0, 1)
        assert atom.partial([None, None]) is None
        assert atom.partial([1, None]) is True
        assert Atom(0, 1, Polarity.NOT_EQUALS).partial([1, None]) is False

    def test_and_short_circuits_on_false(self):
        expr = And((Atom(0, 1), Atom(1, 1)))
        assert expr.partial([0, None]) is False
        assert expr.partial([1, None]) is None

    def test_or_short_circuits_on_true(self):
        expr = Or((Atom(0, 1), Atom(1, 1)))
        assert expr.partial([1, None]) is True
        assert expr.partial([0, None]) is None

    def test_implies(self):
        expr = Implies(Atom(0, 1), Atom(1, 1))
        assert expr.partial([0, None]) is True
        assert expr.partial([None, 1]) is True
        assert expr.partial([1, None]) is None
        assert expr.partial([1, 0]) is False
        assert expr.partial([None, 0]) is None

    def test_relabel_moves_every_atom(self):
        expr = Implies(Atom(0, 1), Or((Atom(2, 0, Polarity.NOT_EQUALS), Not(Atom(0, 0)))))
        moved = relabel(expr, {0: 1, 2: 0})
        assert moved == Implies(Atom(1, 1), Or((Atom(0, 0, Polarity.NOT_EQUALS), Not(Atom(1, 0)))))
        assert relabel(ConstTrue(), {}) == ConstTrue()

    def test_not(self):
        assert Not(Atom(0, 0)).partial([None]) is None
        assert Not(Atom(0, 0)).partial([0]) is False

    @given(
        st.lists(st.integers(0, 2), min_size=3, max_size=3),
        st.lists(st.booleans(), min_size=3, max_size=3),
    )
    @settings(max_examples=100)
    def test_decided_partial_agrees_with_full(self, row, hidden):
        expr = Or((
            Implies(Atom(0, 1), And((Atom(1, 0, Polarity.NOT_EQUALS), Atom(2, 2)))),
            Not(And((Atom(0, 0), Atom(2, 1)))),
        ))
        partial = [None if h else v for v, h in zip(row, hidden)]
        value = expr.partial(partial)
        if value is not None:
            assert value == expr.evaluate(row)
        if not any(hidden):
            assert value == expr.evaluate(row)


class TestFindValidTest:
    def test_covers_valid_interaction(self, phone, ix):
        row = find_valid_test(phone, ix((1, 1), (2, 0)))
        assert row is not None
        assert row[0] == 1 and row[1] == 0
        assert evaluate(phone, row)

    def test_invalid_interaction(self, phone, ix):
        assert find_valid_test(phone, ix((2, 0), (3, 0))) is None

    def test_indistinguishable_pair_has_no_witness(self, phone, ix):
        a = ix((1, 0), (3, 0))
        b = ix((2, 2), (3, 0))
        assert find_valid_test(phone, a, [b]) is None
        assert find_valid_test(phone, b, [a]) is None

    def test_empty_cover(self, phone):
        row = find_valid_test(phone)
        assert row is not None and evaluate(phone, row)

    def test_unsatisfiable(self):
        model = _binary_model(constraints=[And((Atom(0, 0), Atom(0, 0, Polarity.NOT_EQUALS)))])
        assert find_valid_test(model) is None

    def test_avoid_empty_interaction(self, phone):
        assert find_valid_test(phone, EMPTY_INTERACTION, [EMPTY_INTERACTION]) is None

    def test_avoid_respected(self, phone, ix):
        avoid = [ix((4, 0)), ix((5, 1))]
        row = find_valid_test(phone, ix((1, 0)), avoid)
        assert row is not None
        assert not any(member.covered_by(row) for member in avoid)

    def test_partial_overlap_is_not_violation(self, phone, ix):
        row = find_valid_test(phone, ix((1, 0)), [ix((1, 0), (4, 0))])
        assert row is not None and row[3] != 0

    def test_search_is_deterministic(self, phone, ix):
        first = find_valid_test(phone, ix((3, 1)))
        assert first == find_valid_test(phone, ix((3, 1)))

    def test_enumeration_is_lexicographic(self):
        model = _binary_model()
        assert list(ValidTestSearch(model)) == [(0, 0), (0, 1), (1, 0), (1, 1)]

    def test_forward_checking_agrees(self, phone):
        with_fc = list(ValidTestSearch(phone, forward_check=True))
        without_fc = list(ValidTestSearch(phone, forward_check=False))
        assert with_fc == without_fc
        assert len(with_fc) == 31

    def test_shuffled_order_yields_same_tests(self, phone):
        shuffled = list(ValidTestSearch(phone, rng=seeded_rng(3)))
        assert len(shuffled) == 31
        assert set(shuffled) == set(ValidTestSearch(phone))

    def test_shuffled_cover_is_respected(self, phone, ix):
        rng = seeded_rng(0)
        for _ in range(20):
            row = ValidTestSearch(phone, ix((1, 1), (2, 0)), rng=rng).first()
            assert row[0] == 1 and row[1] == 0
            assert evaluate(phone, row)

    def test_shuffled_completions_vary(self):
        model = _binary_model(k=8)
        rng = seeded_rng(1)
        rows = {ValidTestSearch(model, rng=rng).first() for _ in range(10)}
        assert len(rows) > 1
