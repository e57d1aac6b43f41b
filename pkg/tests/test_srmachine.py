import pytest
from fractions import Fraction

from semireal import algo
from semireal.SRExceptions import (
    FileFormatError,
    InvariantBroken,
    LimitInconsistent,
    PendingError,
    PrefixFreeViolation,
)
from semireal.SRMachine import (
    Entry,
    Machine,
    Semimeasure,
    apriori,
    bp,
    bp_prime,
    busy_time,
    kp,
    measured_constant,
    modulus,
    modulus_lower_bound,
    omega,
    omega_real,
    pair_index,
    prefix_chain_machine,
    rows_from_machine,
    self_timing_family,
    self_timing_machine,
    solovay_ratio,
)
from semireal.SRReal import pow2


class TestEntry:
    def test_validation(self):
        with pytest.raises(ValueError):
            Entry(1, "012", 1)
        with pytest.raises(ValueError):
            Entry(0, "0", 1)
        with pytest.raises(ValueError):
            Entry(1, "0", -1)

    def test_line(self):
        assert Entry(7, "0", 5).to_line() == "program:0 output:5 time:7"


class TestMachine:
    """Validation and parsing of finite machines."""

    def test_kraft_sum_and_stats(self, small_machine):
        assert small_machine.kraft_sum() == Fraction(3, 4)
        assert small_machine.stats() == {
            "name": "small",
            "entries": 2,
            "kraft_sum": "3/4",
            "max_time": 7,
            "max_length": 2,
            "outputs": 2,
        }

    def test_entries_are_ordered_by_time(self, small_machine):
        assert [e.program for e in small_machine.entries] == ["10", "0"]
        assert small_machine.enumeration(2) == [Entry(2, "10", 3)]
        assert len(small_machine.enumeration()) == 2

    def test_prefix_violation(self):
        with pytest.raises(PrefixFreeViolation) as exc:
            Machine([Entry(1, "0", 1), Entry(2, "01", 2)])
        assert (exc.value.p, exc.value.q) == ("0", "01")

    def test_conflicting_duplicate(self):
        with pytest.raises(PrefixFreeViolation):
            Machine([Entry(1, "0", 1), Entry(1, "0", 2)])

    def test_identical_duplicate_warns(self):
        with pytest.warns(UserWarning):
            M = Machine([Entry(1, "0", 1), Entry(1, "0", 1)])
        assert len(M.entries) == 1

    def test_from_lines(self):
        lines = [
            "# two programs",
            "program:0 output:5 time:7",
            "",
            "program:10 output:3 time:2  # fast",
        ]
        M = Machine.from_lines(lines, name="parsed")
        assert M.to_lines() == ["program:10 output:3 time:2", "program:0 output:5 time:7"]

    def test_from_lines_errors(self):
        with pytest.raises(FileFormatError) as exc:
            Machine.from_lines(["program:0 output:5 time:7", "program:10 output:3"], source="m.txt")
        assert exc.value.line == 2
        with pytest.raises(FileFormatError):
            Machine.from_lines(["program:0 output:five time:7"])
        with pytest.raises(FileFormatError):
            Machine.from_lines(["program 0"])

    def test_dict_round_trip_and_relabel(self, small_machine):
        again = Machine.from_dict(small_machine.to_dict())
        assert again.entries == small_machine.entries
        relabelled = small_machine.relabel({5: 9})
        assert relabelled.outputs() == [3, 9]


class TestAprioriAndComplexity:
    def test_apriori_weights(self, small_machine):
        m = apriori(small_machine)
        assert m.weights(7) == {3: Fraction(1, 4), 5: Fraction(1, 2)}
        assert m.weight(5, 6) == 0
        assert m.as_real().limit == Fraction(3, 4)

    def test_apriori_fuel_cap(self, small_machine):
        m = apriori(small_machine, fuel=2)
        assert m.weights(100) == {3: Fraction(1, 4)}
        assert m.limit == Fraction(1, 4)

    def test_weight_dominates_shortest_program(self, chain_machine):
        m = apriori(chain_machine)
        for i in chain_machine.outputs():
            verdict = kp(chain_machine, i)
            assert verdict.is_confirmed
            assert m.weight(i, chain_machine.max_time) >= pow2(verdict.payload)

    def test_kp_is_pending_until_revealed(self, small_machine):
        assert kp(small_machine, 5).payload == 1
        assert kp(small_machine, 5, fuel=6).is_pending
        assert kp(small_machine, 4).is_pending

    def test_omega(self, small_machine):
        assert omega(small_machine) == Fraction(3, 4)
        assert omega(small_machine, 2) == Fraction(1, 4)
        real = omega_real(small_machine)
        assert real.approx(0) == 0
        assert real.approx(7) == Fraction(3, 4)
        assert real.limit == Fraction(3, 4)


class TestBusyBeavers:
    def test_small_machine(self, small_machine):
        assert [bp(small_machine, m) for m in range(3)] == [0, 5, 5]
        assert [bp_prime(small_machine, m) for m in range(3)] == [0, 5, 5]
        assert [busy_time(small_machine, m) for m in range(3)] == [0, 7, 7]

    def test_chain_machine(self, chain_machine):
        for m in range(1, 12):
            assert bp(chain_machine, m) == m - 1
            assert bp_prime(chain_machine, m) == m - 1

    def test_bp_below_bp_prime(self, small_machine, chain_machine):
        for M in (small_machine, chain_machine, prefix_chain_machine(5)):
            for m in range(M.max_length + 2):
                assert bp(M, m) <= bp_prime(M, m)

    def test_gap_experiment_frame(self, small_machine):
        df = algo.gap_experiment([small_machine])
        assert list(df.columns) == ["machine", "m", "bp", "bp_prime", "gap", "busy_time"]
        assert list(df["gap"]) == [0, 0, 0]


class TestModulus:
    def test_example(self, halving):
        assert modulus(halving, Fraction(1, 4), 1) == 1
        assert modulus(halving, 1, 1) == 0

    def test_inconsistent_limit(self, halving):
        with pytest.raises(LimitInconsistent) as exc:
            modulus(halving, Fraction(1, 8), Fraction(1, 4))
        assert exc.value.index == 0

    def test_pending_and_bad_eps(self, halving):
        with pytest.raises(PendingError):
            modulus(halving, pow2(10), 1, fuel=3)
        with pytest.raises(ValueError):
            modulus(halving, 0, 1)

    def test_lower_bound(self, halving):
        assert modulus_lower_bound(halving, Fraction(1, 4), 10) == 0
        lower = modulus_lower_bound(halving, Fraction(1, 8), 10)
        assert lower == 1
        assert lower <= modulus(halving, Fraction(1, 8), 1)
        assert modulus_lower_bound(halving, Fraction(1, 8), 0) == 0

    def test_profile(self, halving):
        df = algo.modulus_profile(halving, 1, 3)
        assert list(df["modulus"]) == [0, 0, 1, 2]
        assert list(df["eps"]) == ["1/1", "1/2", "1/4", "1/8"]


class TestSolovayRatio:
    def test_surrogate_ratios_halve(self, chain_machine):
        trace = solovay_ratio(algo.surrogate_series(), chain_machine, n_terms=16)
        assert trace.ratios[0] == 1
        assert trace.ratios[5] == pow2(5)
        assert trace.flagged == [12, 13, 14, 15]
        data = trace.to_dict()
        assert data["ratios"][1] == {"index": 1, "ratio": "1/2"}


class TestSelfTiming:
    def test_machine(self):
        M = self_timing_machine([3, 5, 9])
        assert [busy_time(M, m) for m in range(1, 4)] == [3, 5, 9]
        assert measured_constant(M) == 0

    def test_family(self):
        family = self_timing_family([4, 6], seed=1)
        assert [len(M.entries) for M in family] == [4, 6]
        assert all(measured_constant(M) == 0 for M in family)
        again = self_timing_family([4, 6], seed=1)
        assert [M.to_lines() for M in again] == [M.to_lines() for M in family]

    def test_busy_time_must_be_an_output(self, small_machine):
        with pytest.raises(PendingError):
            measured_constant(small_machine)


class TestSemimeasure:
    def test_total_checks_declared_bound(self):
        m = Semimeasure.from_weights({1: "1/2"}, declared_total="1/4")
        with pytest.raises(InvariantBroken):
            m.total(0)

    def test_dict(self):
        m = Semimeasure.from_weights({1: "1/4", 2: "1/8", 3: 0})
        assert m.to_dict(0) == {
            "name": "m",
            "declared_total": "3/8",
            "weights": {"1": "1/4", "2": "1/8"},
            "total": "3/8",
        }

    def test_rows_from_machine(self):
        M = Machine([Entry(1, "0", pair_index(0, 1)), Entry(2, "10", pair_index(1, 0))])
        assert rows_from_machine(M, 2) == [[0, Fraction(1, 2)], [Fraction(1, 4), 0]]
