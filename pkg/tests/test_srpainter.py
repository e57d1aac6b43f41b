import pytest
from fractions import Fraction

from semireal import algo
from semireal.SRCover import CLOSED, Interval
from semireal.SRPainter import painter
from semireal.SRReal import SEQUENCE, LscReal, pow2


class TestPainter:
    """Painters never paint a point twice."""

    def test_two_painters(self):
        starts = LscReal.from_terms(SEQUENCE, [0, "1/4"])
        result = painter(starts, ["1/2", "1/2"], 2, doubling=False)
        assert result.pieces == [(0, Interval(0, "1/2", CLOSED)), (1, Interval("1/2", 1, CLOSED))]
        assert result.painted_measure == 1
        assert result.consumed == [Fraction(1, 2), Fraction(1, 2)]

    def test_doubling(self):
        starts = LscReal.from_terms(SEQUENCE, [0, "1/4"])
        result = painter(starts, ["1/2", "1/2"], 2)
        assert result.doubling
        assert result.painted_measure == 2
        assert result.is_painted(Fraction(3, 2))

    def test_conservation_on_random_schedules(self, rng):
        for _ in range(20):
            starts, paint = algo.random_painter_schedule(rng, 12)
            result = painter(starts, paint, 12, doubling=False)
            assert result.painted_measure == result.total_consumed
            pieces = sorted((iv for _, iv in result.pieces), key=lambda iv: iv.left)
            for x, y in zip(pieces, pieces[1:]):
                assert x.right <= y.left

    def test_paint_from_reals(self):
        h = [LscReal.from_terms(SEQUENCE, ["1/8", "1/4"])]
        result = painter(LscReal.constant(0), h, 3, doubling=False)
        assert [iv for _, iv in result.pieces] == [Interval(0, "1/8", CLOSED), Interval("1/8", "1/4", CLOSED)]
        assert result.consumed == [Fraction(1, 4), 0, 0]

    def test_decreasing_paint_raises(self):
        with pytest.raises(ValueError):
            painter(LscReal.constant(0), lambda i, t: Fraction(1, t + 1), 3, doubling=False)

    def test_cover_groups_by_stage(self):
        starts = LscReal.from_terms(SEQUENCE, [0, "1/4"])
        result = painter(starts, ["1/2", "1/2"], 2, doubling=False)
        cover = result.cover()
        assert cover.emitted(1) == [Interval(0, "1/2", CLOSED)]
        assert cover.length_budget == 1
        data = result.to_dict()
        assert data["painted_measure"] == "1/1"
        assert data["pieces"][1]["stage"] == 1
        assert result.logs


class TestSurrogateRun:
    def test_limit_is_painted_cheaply(self):
        result = algo.surrogate_painter_run()
        assert result.is_painted(Fraction(2, 3))
        assert result.is_painted(algo.surrogate_series().approx(100))
        assert result.total_consumed == Fraction(1, 2) - pow2(111)
        assert result.painted_measure == result.total_consumed
