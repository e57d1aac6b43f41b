import pytest
from fractions import Fraction

from semireal.SRCover import (
    CLOSED,
    OPEN,
    Cover,
    Interval,
    contains,
    contiguous_extent,
    covered,
    covered_measure_between,
    covered_terms,
    merge_intervals,
    term_interval,
    total_length,
    transform_cover,
    u_c_cover,
    union_bound,
    union_measure,
)
from semireal.SRExceptions import DensityViolated, LengthBudgetExceeded, SemirealError
from semireal.SRMachine import Entry, Machine
from semireal.SRReal import SEQUENCE, LscReal
from semireal.SRReduction import compose_witnesses, identity_witness, witness_from_sum
from semireal import algo


def F(*args):
    return Fraction(*args)


@pytest.fixture
def dense_instance():
    """Six intervals over four weighted points, all of density at least c/2 for c = 4."""
    intervals = [
        Interval(F("1/16"), F("3/16")),
        Interval(F("3/32"), F("7/32")),
        Interval(F("5/16"), F("7/16")),
        Interval(F("11/32"), F("13/32")),
        Interval(F("9/16"), F("11/16")),
        Interval(F("27/32"), F("29/32")),
    ]
    weights = {F("1/8"): F("1/4"), F("3/8"): F("1/4"), F("5/8"): F("1/4"), F("7/8"): F("1/8")}
    return intervals, weights


class TestInterval:
    def test_open_and_closed_membership(self):
        iv = Interval("1/4", "1/2")
        assert iv.length == F("1/4")
        assert not iv.contains_point(F("1/4"))
        assert Interval("1/4", "1/2", CLOSED).contains_point(F("1/4"))

    def test_invalid_intervals(self):
        with pytest.raises(ValueError):
            Interval(1, 0)
        with pytest.raises(ValueError):
            Interval(0, 1, "half-open")

    def test_empty_open_interval(self):
        assert Interval(1, 1, OPEN).is_empty
        assert not Interval(1, 1, CLOSED).is_empty

    def test_contains_interval(self):
        outer = Interval(0, 1, OPEN)
        assert outer.contains_interval(Interval("1/4", "1/2", CLOSED))
        assert not outer.contains_interval(Interval(0, "1/2", CLOSED))
        assert Interval(0, 1, CLOSED).contains_interval(Interval(0, 1, CLOSED))

    def test_lies_left_of(self):
        assert Interval(0, "1/2", OPEN).lies_left_of(F("1/2"))
        assert not Interval(0, "1/2", CLOSED).lies_left_of(F("1/2"))

    def test_enlarged_and_shifted(self):
        iv = Interval("1/4", "1/2", CLOSED)
        assert iv.enlarged("1/8") == Interval("1/8", "5/8", OPEN)
        moved = iv.shifted_to("3/4")
        assert moved == Interval("3/4", 1, CLOSED)
        assert moved.length == iv.length

    def test_dict_round_trip(self):
        iv = Interval("1/3", "2/3", CLOSED)
        assert Interval.from_dict(iv.to_dict()) == iv
        assert str(iv) == "[1/3, 2/3]"


class TestSweep:
    """The endpoint sweep never loses an uncovered point."""

    def test_abutting_open_intervals_leave_a_hole(self):
        ivs = [Interval(0, "1/2"), Interval("1/2", 1)]
        assert len(merge_intervals(ivs)) == 2
        assert union_measure(ivs) == 1
        assert not covered(Interval("1/4", "3/4", CLOSED), ivs)

    def test_closed_end_bridges(self):
        ivs = [Interval(0, "1/2", CLOSED), Interval("1/2", "3/4")]
        assert len(merge_intervals(ivs)) == 1
        assert covered(Interval("1/4", "5/8", CLOSED), ivs)
        assert contiguous_extent(F("1/4"), ivs) == F("1/2")

    def test_contiguous_extent_outside(self):
        assert contiguous_extent(F("7/8"), [Interval(0, "1/2")]) is None

    def test_overlaps_measured_once(self):
        ivs = [Interval(0, "1/2"), Interval("1/4", "3/4"), Interval("1/8", "1/4")]
        assert union_measure(ivs) == F("3/4")

    def test_covered_measure_between(self):
        ivs = [Interval(0, "1/2"), Interval("3/4", 1)]
        assert covered_measure_between(F("1/4"), None, ivs) == F("1/2")
        assert covered_measure_between(F("1/4"), F("7/8"), ivs) == F("3/8")


class TestTermIntervals:
    def test_term_interval(self, quarter_series):
        assert term_interval(quarter_series, 0) == Interval(0, 0, CLOSED)
        assert term_interval(quarter_series, 2) == Interval("1/4", "3/8", CLOSED)

    def test_negative_start_rejected(self):
        d = LscReal.from_terms("series", ["-1", "1"])
        with pytest.raises(SemirealError):
            term_interval(d, 0)

    def test_covered_terms(self, quarter_series):
        ivs = [Interval("1/4", "1/2", CLOSED)]
        assert covered_terms(quarter_series, ivs, 5) == [2, 3, 4]


class TestCover:
    def test_emitted_is_prefix_monotone(self):
        cover = Cover.from_intervals([Interval(0, "1/8"), Interval("1/2", "5/8")], length_budget="1/4")
        assert cover.emitted(1) == [Interval(0, "1/8")]
        assert cover.emitted(5) == cover.emitted(2)
        assert cover.ended_within(2)
        assert not cover.ended_within(1)
        assert cover.step_items(3) is None

    def test_total_length_and_budget(self):
        cover = Cover.from_intervals([Interval(0, "1/8"), Interval("1/16", "3/16")], length_budget="1/8")
        assert total_length(cover, 1) == F("1/8")
        with pytest.raises(LengthBudgetExceeded):
            total_length(cover, 2)
        assert cover.union_measure(2) == F("3/16")

    def test_grouped_cover(self):
        groups = iter([(), (Interval(0, "1/4"), Interval("1/2", 1)), ()])
        cover = Cover(groups, grouped=True)
        assert cover.emitted(1) == []
        assert len(cover.emitted(3)) == 2

    def test_failure_is_sticky(self):
        def broken():
            yield Interval(0, "1/4")
            raise SemirealError("source broke")

        cover = Cover(broken())
        assert len(cover.emitted(1)) == 1
        with pytest.raises(SemirealError):
            cover.emitted(2)
        with pytest.raises(SemirealError):
            cover.emitted(3)

    def test_dict_round_trip(self, cover_near_one):
        data = cover_near_one.to_dict(3)
        again = Cover.from_dict(data)
        assert again.emitted(3) == cover_near_one.emitted(3)
        assert again.length_budget == F("1/8")


class TestContains:
    def test_confirmed_once_tail_is_inside(self, cover_near_one, halving):
        # a_3 = 15/16 sits on the open left end, a_4 = 31/32 is inside
        assert contains(cover_near_one, halving, 4).is_pending
        verdict = contains(cover_near_one, halving, 5)
        assert verdict.is_confirmed and verdict.payload is True

    def test_pending_without_known_sup(self, cover_near_one):
        a = LscReal(SEQUENCE, lambda n: 1 - F(1) / 2 ** (n + 1))
        assert contains(cover_near_one, a, 50).is_pending

    def test_zero_fuel(self, cover_near_one, halving):
        assert contains(cover_near_one, halving, 0).is_pending


class TestTransformCover:
    def test_identity_witness_moves_interval_onto_alpha(self, cover_near_one, halving):
        out = transform_cover(cover_near_one, identity_witness(halving), halving, halving)
        emitted = out.emitted(10)
        assert emitted == [Interval("31/32", "35/32", CLOSED)]
        assert total_length(out, 10) <= total_length(cover_near_one, 10)
        assert contains(out, halving, 10).is_confirmed
        assert any("->" in line for line in out.logs)

    def test_intervals_left_of_beta_are_dropped(self, halving):
        source = Cover.from_intervals([Interval(0, "1/4"), Interval("15/16", "17/16")], length_budget="3/8")
        out = transform_cover(source, identity_witness(halving), halving, halving)
        assert out.emitted(10) == [Interval("31/32", "35/32", CLOSED)]
        assert any("dropped" in line for line in out.logs)

    def test_containment_on_random_pairs(self, rng):
        for _ in range(10):
            a = algo.random_geometric(rng)
            cover = Cover.from_intervals([Interval(a.limit - F(1, 64), a.limit + F(1, 64))], length_budget=F(1, 32))
            out = transform_cover(cover, identity_witness(a), a, a)
            assert total_length(out, 200) <= total_length(cover, 200)
            if contains(cover, a, 200).is_confirmed:
                assert contains(out, a, 200).is_confirmed

    def test_sum_witness_moves_interval_onto_alpha(self):
        alpha = LscReal.geometric("1/2", "1/2", "1/2", name="alpha")
        rho = LscReal.geometric("1/4", "1/4", "1/2", name="rho")
        w = witness_from_sum(alpha, rho)
        source = Cover.from_intervals([Interval("11/16", "13/16")], length_budget="1/8")
        assert contains(source, w.beta, 20).is_confirmed
        out = transform_cover(source, w, alpha, w.beta)
        # b_4 = 45/64 enters the interval, phi(45/64) is found one step later
        assert out.emitted(20) == [Interval("31/64", "39/64", CLOSED)]
        assert out.length_budget == F("1/8")
        assert total_length(out, 20) == F("1/8")
        assert contains(out, alpha, 20).is_confirmed
        assert any("phi at b=45/64" in line for line in out.logs)

    def test_composed_witness_agrees_with_its_outer_witness(self):
        alpha = LscReal.geometric("1/2", "1/2", "1/2", name="alpha")
        rho = LscReal.geometric("1/4", "1/4", "1/2", name="rho")
        outer = witness_from_sum(alpha, rho)
        w = compose_witnesses(identity_witness(alpha), outer)
        source = Cover.from_intervals([Interval("11/16", "13/16")], length_budget="1/8")
        out = transform_cover(source, w, alpha, outer.beta)
        assert out.emitted(20) == transform_cover(source, outer, alpha, outer.beta).emitted(20)

    def test_sum_witness_on_random_pairs(self, rng):
        for _ in range(10):
            a, r = algo.random_sum_pair(rng)
            w = witness_from_sum(a, r)
            beta_limit = a.limit + r.limit
            cover = Cover.from_intervals(
                [Interval(beta_limit - F(1, 64), beta_limit + F(1, 64))], length_budget=F(1, 32)
            )
            assert contains(cover, w.beta, 200).is_confirmed
            out = transform_cover(cover, w, a, w.beta)
            assert contains(out, a, 200).is_confirmed
            assert total_length(out, 200) <= F(1, 32)


class TestUnionBound:
    def test_bundled_shape_instance(self, dense_instance):
        intervals, weights = dense_instance
        result = union_bound(intervals, weights, 4)
        assert result.bound == 1
        assert result.union_measure == F("15/32")
        assert result.removed == [Interval("11/32", "13/32")]
        assert len(result.kept) == 5
        assert [iv.left for iv in result.even] == [F("1/16"), F("5/16"), F("27/32")]
        d = result.to_dict()
        assert set(d["even_odd_partition"]) == {"even", "odd"}

    def test_density_violation(self):
        with pytest.raises(DensityViolated):
            union_bound([Interval(0, "1/2")], {F("1/4"): F("1/2")}, 4)

    def test_weight_over_one(self):
        with pytest.raises(SemirealError):
            union_bound([], {F(0): F(3, 4), F(1): F(1, 2)}, 4)

    def test_bad_constant(self):
        with pytest.raises(SemirealError):
            union_bound([], {}, 0)

    def test_randomized_instances(self, rng):
        for _ in range(100):
            c = int(rng.integers(2, 16))
            intervals, weights = algo.random_union_bound_instance(rng, c)
            result = union_bound(intervals, weights, c)
            assert result.union_measure <= F(4, c)
            for cls in (result.even, result.odd):
                for x, y in zip(cls, cls[1:]):
                    assert x.right <= y.left


class TestUcCover:
    def test_neighbourhoods(self, small_machine):
        cover = u_c_cover(small_machine, 2)
        # output 3 has the length-2 program, output 5 the length-1 program
        assert cover.emitted(5) == [
            Interval(F("2") - F("1/16"), F("2") + F("1/16")),
            Interval(F("3/2") - F("1/8"), F("3/2") + F("1/8")),
        ]
        assert cover.length_budget == F("1/2")
        assert total_length(cover, 5) == F("3/8")

    def test_fuel_limits_entries(self, small_machine):
        assert len(u_c_cover(small_machine, 2, fuel=2).emitted(5)) == 1

    def test_improved_bound_reemits(self):
        M = Machine([Entry(1, "10", 4), Entry(2, "0", 4)], name="improve")
        assert len(u_c_cover(M, 1).emitted(5)) == 2
        M2 = Machine([Entry(1, "0", 4), Entry(2, "10", 4)], name="no-improve")
        assert len(u_c_cover(M2, 1).emitted(5)) == 1

    def test_negative_c(self, small_machine):
        with pytest.raises(ValueError):
            u_c_cover(small_machine, -1)
