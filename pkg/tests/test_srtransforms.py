import pytest
from fractions import Fraction

from semireal import algo
from semireal.SRCover import Cover, Interval
from semireal.SRExceptions import FileFormatError, RowNotFinite, SumMismatch
from semireal.SRMachine import Semimeasure, apriori, pair_index
from semireal.SRReal import SERIES, LscReal, pow2, series_from_seq
from semireal.SRTransforms import (
    DoubleSeries,
    allocate_mtilde,
    combine_allocations,
    cover_to_semimeasure,
    mesh_refine,
    regroup,
    split_nonincreasing,
)


@pytest.fixture
def three_cells():
    """Row 0 holds 1/8 and 1/8, row 1 holds 1/4."""
    return DoubleSeries({(0, 0): "1/8", (0, 1): "1/8", (1, 0): "1/4"}, name="three")


class TestDoubleSeries:
    def test_shape_and_sums(self, three_cells):
        assert three_cells.n_rows == 2
        assert three_cells.n_columns == 2
        assert three_cells.row_sum(0) == Fraction(1, 4)
        assert three_cells.total() == Fraction(1, 2)
        assert three_cells.total(1) == Fraction(1, 4)
        assert three_cells.term(1, 1) == 0

    def test_zero_cells_are_dropped(self):
        d = DoubleSeries.from_rows([["1/4", 0], [0, "1/8"]])
        assert d.row(0) == [(0, Fraction(1, 4))]
        assert d.to_dict() == {"name": "double-series", "cells": [[0, 0, "1/4"], [1, 1, "1/8"]]}

    def test_negative_cell(self):
        with pytest.raises(ValueError):
            DoubleSeries({(0, 0): "-1/4"})

    def test_row_support_is_enforced(self):
        with pytest.raises(RowNotFinite) as exc:
            DoubleSeries({(0, 0): "1/4", (0, 3): "1/8"}, row_support={0: [0, 1]})
        assert (exc.value.row, exc.value.column) == (0, 3)

    def test_lines(self, three_cells):
        lines = three_cells.to_lines()
        assert lines == ["0 0 1/8", "0 1 1/8", "1 0 1/4"]
        again = DoubleSeries.from_lines(["# cells"] + lines)
        assert again.cells == three_cells.cells

    def test_line_errors(self):
        with pytest.raises(FileFormatError):
            DoubleSeries.from_lines(["0 0"])
        with pytest.raises(FileFormatError):
            DoubleSeries.from_lines(["0 0 1/0"])
        with pytest.warns(UserWarning):
            d = DoubleSeries.from_lines(["0 0 1/8", "0 0 1/4"])
        assert d.term(0, 0) == Fraction(1, 4)


class TestRegroup:
    def test_row_sums(self, three_cells):
        r = regroup(three_cells)
        assert r.prefix(2) == [Fraction(1, 4), Fraction(1, 4)]
        assert r.limit == Fraction(1, 2)

    def test_randomized(self, rng):
        for _ in range(50):
            d = algo.random_double_series(rng, 4, 5)
            r = regroup(d)
            assert r.limit == d.total()
            assert r.approx(max(d.n_rows - 1, 0)) == d.total()

    def test_empty(self):
        assert regroup(DoubleSeries({})).limit == 0


class TestAllocation:
    def test_caps_and_targets(self, three_cells):
        m = Semimeasure.from_weights({0: "1/2", 1: "1/8"})
        alloc = allocate_mtilde(three_cells, m, 2, fuel=1)
        assert alloc.mtilde == {(0, 0): Fraction(1, 4), (0, 1): Fraction(1, 4), (1, 0): Fraction(1, 8)}
        assert alloc.ratio_bound_holds(three_cells, 0)
        assert alloc.ratio_bound_holds(three_cells, 1)
        assert alloc.to_dict() == {
            "c": "2/1",
            "mtilde": [[0, 0, "1/4"], [0, 1, "1/4"], [1, 0, "1/8"]],
            "caps": {"0": "1/2", "1": "1/8"},
        }

    def test_staged_allocation(self):
        d = DoubleSeries({(0, 0): "1/8", (0, 1): "1/8"})
        m = Semimeasure(lambda i, t: Fraction(t, 8) if i == 0 else Fraction(0), lambda t: [0])
        alloc = allocate_mtilde(d, m, 2, fuel=5)
        assert alloc.increments[0] == {}
        assert alloc.value(0, 0, 2) == Fraction(1, 8)
        assert alloc.value(0, 0, 3) == Fraction(1, 4)
        assert alloc.value(0, 1, 4) == Fraction(1, 8)
        assert alloc.value(0, 1) == Fraction(1, 4)
        assert alloc.row_total(0) == Fraction(1, 2)

    def test_apriori_rows_need_their_halting_stages(self, small_machine):
        d = DoubleSeries({(3, 0): "1/16", (5, 0): "1/8"})
        m = apriori(small_machine)
        assert allocate_mtilde(d, m, 2, fuel=1).mtilde == {}
        # output 3 halts at time 2, output 5 at time 7
        early = allocate_mtilde(d, m, 2, fuel=small_machine.max_time)
        assert early.mtilde == {(3, 0): Fraction(1, 8)}
        full = allocate_mtilde(d, m, 2, fuel=small_machine.max_time + 1)
        assert full.mtilde == {(3, 0): Fraction(1, 8), (5, 0): Fraction(1, 4)}
        combined = combine_allocations(d, m, 1, fuel=small_machine.max_time + 1)
        assert combined.weight(pair_index(5, 0), small_machine.max_time) == Fraction(1, 4)

    def test_fuel_is_required(self, three_cells):
        m = Semimeasure.from_weights({0: "1/2"})
        with pytest.raises(TypeError):
            allocate_mtilde(three_cells, m, 2)
        with pytest.raises(TypeError):
            combine_allocations(three_cells, m, 2)

    def test_bad_multiplier(self, three_cells):
        with pytest.raises(ValueError):
            allocate_mtilde(three_cells, Semimeasure.from_weights({0: "1/2"}), 0, fuel=1)

    def test_combined_levels(self, three_cells):
        m = Semimeasure.from_weights({0: "1/2", 1: "1/8"})
        combined = combine_allocations(three_cells, m, 2, fuel=1)
        assert combined.weight(pair_index(0, 0), 0) == Fraction(3, 8)
        assert combined.weight(pair_index(0, 1), 0) == 0
        assert combined.weight(pair_index(1, 0), 0) == Fraction(3, 32)
        assert combined.total(0) == Fraction(15, 32)
        with pytest.raises(ValueError):
            combine_allocations(three_cells, m, 0, fuel=1)


class TestMeshRefine:
    def test_bundled_pair(self):
        a = LscReal.from_terms(SERIES, ["1/2", "1/2"])
        b = LscReal.from_terms(SERIES, ["1/4", "3/4"])
        r = mesh_refine(a, b, 1, n_terms=2)
        assert r.c == [Fraction(1, 4), Fraction(1, 4), Fraction(1, 2)]
        assert r.groupings == {"a": [[0, 1], [2]], "b": [[0], [1, 2]]}
        assert r.recover("a") == [Fraction(1, 2), Fraction(1, 2)]
        assert r.series().limit == 1

    def test_randomized_equal_sum_pairs(self, rng):
        for _ in range(30):
            a, b = algo.random_equal_sum_pair(rng, 6)
            r = mesh_refine(a, b, 1, n_terms=6)
            assert r.recover("a") == a.prefix(6)
            assert r.recover("b") == b.prefix(6)
            assert sum(r.c, Fraction(0)) == 1

    def test_truncates_at_smaller_partial_sum(self, halving):
        r = mesh_refine(series_from_seq(halving), LscReal.from_terms(SERIES, [1]), 1, n_terms=3)
        assert r.c == [Fraction(1, 2), Fraction(1, 4), Fraction(1, 8)]
        assert r.groupings["b"] == []

    def test_sum_mismatch(self):
        a = LscReal.from_terms(SERIES, ["1/2", "1/2"])
        with pytest.raises(SumMismatch):
            mesh_refine(a, a, 2)
        runaway = LscReal(SERIES, lambda i: Fraction(1, 2))
        with pytest.raises(SumMismatch):
            mesh_refine(runaway, a, 1, n_terms=3)
        with pytest.raises(ValueError):
            mesh_refine(a, a, 1, n_terms=0)


class TestSplitNonincreasing:
    def test_example(self):
        r = LscReal.from_terms(SERIES, ["1/4", "1/2", "0", "1/8", "3/8"])
        out = split_nonincreasing(r, n_terms=5)
        assert out.c == [Fraction(1, 4)] * 3 + [Fraction(1, 8)] * 4
        assert out.groupings["r"] == [[0], [1, 2], [], [3], [4, 5, 6]]
        assert out.recover("r") == r.prefix(5)

    def test_randomized(self, rng):
        for _ in range(20):
            v = algo.random_positive_series(rng, 8)
            out = split_nonincreasing(v, n_terms=8)
            assert all(x >= y for x, y in zip(out.c, out.c[1:]))
            assert out.recover("r") == v.prefix(8)

    def test_negative_start(self):
        with pytest.raises(ValueError):
            split_nonincreasing(LscReal.from_terms(SERIES, ["-1/4"]), n_terms=1)


class TestCoverToSemimeasure:
    def test_covered_terms_are_scaled(self, quarter_series):
        cov = Cover.from_intervals([Interval("7/32", "13/32")], length_budget="1/4")
        M = cover_to_semimeasure(quarter_series, cov, 1, 5)
        assert M.weights(0) == {2: Fraction(1, 4)}
        assert M.declared_total == Fraction(1, 2)
        assert M.total(0) <= pow2(1)

    def test_budget_must_be_small(self, quarter_series):
        with pytest.raises(ValueError):
            cover_to_semimeasure(quarter_series, Cover.from_intervals([], length_budget="1/2"), 1, 5)
        with pytest.raises(ValueError):
            cover_to_semimeasure(quarter_series, Cover.from_intervals([]), 1, 5)
