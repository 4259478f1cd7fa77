"""Tests for row-deletion reduction of covering arrays into CLAs."""

import pytest

from clatool.array import RowSet, TestArray
from clatool.cca import generate_cca
from clatool.enumeration import enumerate_valid_tests, interactions_of, valid_interactions
from clatool.errors import InputError, PreconditionError
from clatool.model import Interaction
from clatool.reduce import (
    CoverageMap,
    build_coverage_map,
    check_cca_precondition,
    reduce_rows,
    reduce_runs,
    reduce_to_cla,
)
from clatool.verify import verify_cla

T1 = Interaction.of((0, 0))
T2 = Interaction.of((1, 0))
T3 = Interaction.of((2, 0))


def _make_toy_map():
    """Three interactions over five rows: T1 in rows 0-2, T2 in 0, 1, 3, T3 in 3, 4."""
    return CoverageMap({
        T1: RowSet.from_indices([0, 1, 2]),
        T2: RowSet.from_indices([0, 1, 3]),
        T3: RowSet.from_indices([3, 4]),
    })


def _deleted(verdicts):
    return [verdict.row for verdict in verdicts if verdict.deleted]


def _exhaustive(model):
    return TestArray(model, enumerate_valid_tests(model))


class TestCoverageMap:
    def test_fig3_entry(self, phone, fig, ix):
        array = fig("fig3")
        coverage = build_coverage_map(array, valid_interactions(phone, 2))
        assert coverage[ix((1, 0), (2, 0))].to_list() == [0, 1]
        assert len(coverage) == 57

    def test_empty_interaction_not_in_domain(self, phone, fig):
        coverage = build_coverage_map(fig("fig3"), valid_interactions(phone, 2))
        assert Interaction() not in coverage

    def test_empty(self, phone):
        coverage = build_coverage_map(TestArray(phone, []), [])
        assert len(coverage) == 0
        assert coverage.as_dict() == {}

    def test_interactions_at(self):
        coverage = _make_toy_map()
        assert set(coverage.interactions_at(3)) == {T2, T3}
        assert coverage.interactions_at(9) == []

    def test_blockers(self):
        coverage = _make_toy_map()
        assert coverage.removal_blocker(0) is None
        coverage.remove_row(4)
        assert coverage.removal_blocker(3).startswith("would uncover")

    def test_merge_blocker(self):
        coverage = CoverageMap({T1: RowSet.from_indices([0, 1]), T2: RowSet.from_indices([1])})
        assert coverage.removal_blocker(0).startswith("would merge")

    def test_incremental_matches_rebuild(self, phone):
        cca = generate_cca(phone, 3, seed=2)
        vi = valid_interactions(phone, 2)
        coverage = build_coverage_map(cca, vi)
        kept = list(range(len(cca)))
        for row in range(0, len(cca), 3):
            coverage.remove_row(row)
            kept.remove(row)
            rebuilt = build_coverage_map(cca.subarray(kept), vi)
            for interaction in vi:
                expected = [kept[i] for i in rebuilt[interaction]]
                assert coverage[interaction].to_list() == expected


class TestReduceRows:
    def test_ascending_order(self):
        verdicts = reduce_rows(_make_toy_map(), [0, 1, 2, 3, 4])
        assert _deleted(verdicts) == [0, 1]

    def test_descending_order(self):
        verdicts = reduce_rows(_make_toy_map(), [4, 3, 2, 1, 0])
        assert _deleted(verdicts) == [4, 2, 1]

    def test_kept_rows_have_reasons(self):
        verdicts = reduce_rows(_make_toy_map(), [0, 1, 2, 3, 4])
        kept = [verdict for verdict in verdicts if not verdict.deleted]
        assert [verdict.row for verdict in kept] == [2, 3, 4]
        assert all(verdict.reason for verdict in kept)


class TestReduceToCla:
    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_phone_pairwise(self, phone, seed):
        cca = generate_cca(phone, 3, seed=seed)
        cla, report = reduce_to_cla(phone, cca, 2, seed)
        assert verify_cla(phone, cla, 1, 2, bar_d=True, bar_t=True).passed
        assert len(cla) == report.output_size <= len(cca)
        assert set(cla) <= set(cca)
        assert report.input_size == len(cca)
        assert len(report.deletion_order) == report.deleted
        assert [verdict.row for verdict in report.verdicts] == list(range(len(cca)))

    def test_exhaustive_array(self, phone):
        exhaustive = _exhaustive(phone)
        cla, report = reduce_to_cla(phone, exhaustive, 1)
        assert len(cla) <= 31
        assert report.deleted > 0
        assert verify_cla(phone, cla, 1, 1, bar_d=True, bar_t=True).passed

    def test_deterministic(self, phone):
        cca = generate_cca(phone, 3)
        first, first_report = reduce_to_cla(phone, cca, 2, seed=9)
        second, second_report = reduce_to_cla(phone, cca, 2, seed=9)
        assert first == second
        assert first_report.deletion_order == second_report.deletion_order

    def test_reducing_again_still_locates(self, phone):
        cca = generate_cca(phone, 3, seed=4)
        cla, _ = reduce_to_cla(phone, cca, 2, seed=4)
        again, _ = reduce_to_cla(phone, cla, 2, seed=5, check=False)
        assert len(again) <= len(cla)
        assert verify_cla(phone, again, 1, 2, bar_d=True, bar_t=True).passed

    def test_pairwise_array_reduced_for_one_way(self, phone, fig):
        cla, _ = reduce_to_cla(phone, fig("fig3"), 1)
        assert verify_cla(phone, cla, 1, 1, bar_d=True, bar_t=True).passed

    def test_rejects_uncovering_input(self, phone, fig):
        with pytest.raises(PreconditionError, match="is not covered"):
            reduce_to_cla(phone, fig("fig4"), 1)

    def test_rejects_invalid_rows(self, phone, fig):
        with pytest.raises(PreconditionError, match="row 0 violates"):
            reduce_to_cla(phone, fig("fig2"), 1)

    def test_strength_range(self, phone, fig):
        with pytest.raises(InputError):
            reduce_to_cla(phone, fig("fig3"), 5)
        with pytest.raises(InputError):
            reduce_to_cla(phone, fig("fig3"), 0)

    def test_pairwise_array_is_not_three_way(self, phone, fig):
        with pytest.raises(PreconditionError):
            check_cca_precondition(phone, fig("fig3"), 3, spot_checks=1000)

    def test_one_way_signatures_distinct_on_exhaustive_array(self, phone):
        exhaustive = _exhaustive(phone)
        vi = set()
        for row in exhaustive:
            vi.update(interactions_of(row, 1))
        coverage = build_coverage_map(exhaustive, vi)
        signatures = {coverage[member] for member in vi}
        assert len(signatures) == len(vi)


class TestReduceRuns:
    def test_keeps_smallest(self, phone):
        cca = generate_cca(phone, 3, seed=6)
        cla, report = reduce_runs(phone, cca, 2, seed=6, runs=4)
        assert len(report.run_sizes) == 4
        assert len(cla) == min(report.run_sizes)
        assert report.run == report.run_sizes.index(min(report.run_sizes))

    def test_matches_single_run(self, phone):
        cca = generate_cca(phone, 3, seed=8)
        single, _ = reduce_to_cla(phone, cca, 2, seed=8, run=0)
        best, _ = reduce_runs(phone, cca, 2, seed=8, runs=1)
        assert single == best

    def test_parallel_matches_serial(self, phone):
        cca = generate_cca(phone, 3, seed=10)
        serial, serial_report = reduce_runs(phone, cca, 2, seed=10, runs=3, workers=1)
        parallel, parallel_report = reduce_runs(phone, cca, 2, seed=10, runs=3, workers=2)
        assert serial == parallel
        assert serial_report.run_sizes == parallel_report.run_sizes

    def test_runs_must_be_positive(self, phone, fig):
        with pytest.raises(InputError):
            reduce_runs(phone, fig("fig3"), 1, runs=0)
