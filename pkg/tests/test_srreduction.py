import pytest
from fractions import Fraction

from semireal import algo
from semireal.SRExceptions import DominationViolated, PendingError, SemirealError
from semireal.SRMachine import Semimeasure
from semireal.SRReal import SEQUENCE, SERIES, LscReal, Verdict, pow2, scale, seq_from_series
from semireal.SRReduction import (
    ReductionWitness,
    compose_witnesses,
    diff_to_lsc,
    dominated_witness,
    identity_witness,
    omega_with_sum,
    split_along,
    weighted_complete,
    witness_against_scale,
    witness_from_sum,
)


@pytest.fixture
def sum_pair():
    """alpha -> 1/2 and rho -> 1/4, both geometric."""
    alpha = LscReal.geometric("1/2", "1/2", "1/2", name="alpha")
    rho = LscReal.geometric("1/4", "1/4", "1/2", name="rho")
    return alpha, rho


class TestReductionWitness:
    def test_constant_must_be_positive_integer(self):
        with pytest.raises(ValueError):
            ReductionWitness(lambda r, f: Verdict.confirmed(r), constant=0)

    def test_require_pending_raises(self):
        a, r = LscReal.constant("1/4"), LscReal.constant("1/4")
        w = witness_from_sum(a, r)
        # a_n + r_n never exceeds 1/2
        assert w.query(Fraction(1, 2), 50).is_pending
        with pytest.raises(PendingError):
            w.require(Fraction(1, 2), 50)
        assert w.require(Fraction(1, 4), 50) == Fraction(1, 4)

    def test_check_exact_needs_limits(self):
        a = LscReal(SEQUENCE, lambda n: Fraction(n, n + 1))
        w = identity_witness(a)
        with pytest.raises(ValueError):
            w.check_exact(Fraction(1, 2))
        assert w.check_exact(Fraction(1, 2), alpha_limit=1, beta_limit=1)

    def test_against_scaled_beta(self, sum_pair):
        alpha, rho = sum_pair
        w1 = witness_from_sum(alpha, rho)
        assert w1.against_scaled_beta() is w1
        w2 = witness_against_scale(alpha, alpha, 2, alpha)
        flat = w2.against_scaled_beta()
        assert flat.constant == 1
        assert flat.beta.limit == 1


class TestWitnessFromSum:
    def test_example(self, sum_pair):
        alpha, rho = sum_pair
        w = witness_from_sum(alpha, rho)
        assert w.check_exact(Fraction(5, 8))
        assert w.beta.limit == Fraction(3, 4)

    def test_phi_values(self, sum_pair):
        alpha, rho = sum_pair
        w = witness_from_sum(alpha, rho)
        # a_0 + r_0 = 0, a_1 + r_1 = 1/4 + 1/8 is the first sum above 1/4
        assert w.require(Fraction(1, 4)) == Fraction(1, 4)
        for r in (Fraction(0), Fraction(1, 3), Fraction(2, 3), Fraction(47, 64)):
            assert w.check_exact(r)

    def test_diff_round_trip(self, rng):
        for _ in range(20):
            alpha, rho = algo.random_sum_pair(rng)
            w = witness_from_sum(alpha, rho)
            d = diff_to_lsc(w, w.beta)
            assert d.limit == rho.limit
            assert abs(d.approx(199) - rho.limit) < pow2(30)
            assert d.approx(199) <= rho.limit

    def test_diff_needs_constant_one(self, sum_pair):
        alpha, _ = sum_pair
        w = witness_against_scale(alpha, alpha, 2, alpha)
        with pytest.raises(ValueError):
            diff_to_lsc(w, alpha)

    def test_diff_stalls_without_confirmations(self):
        a, r = LscReal.constant("1/4"), LscReal.constant("1/4")
        w = witness_from_sum(a, r)
        d = diff_to_lsc(w, w.beta, stall_limit=20)
        with pytest.raises(PendingError):
            d.approx(0)


class TestIdentityAndDomination:
    def test_identity_splits_into_itself(self):
        v = LscReal.from_terms(SERIES, ["1/4", "1/8", "1/8", "1/4"], name="v")
        u = split_along(v, identity_witness(seq_from_series(v)))
        assert u.prefix(4) == v.prefix(4)
        assert u.case_counts[2] == 3

    def test_dominated_witness(self):
        u = LscReal.from_terms(SERIES, ["1/4", "1/8", "1/16"], name="u")
        v = LscReal.from_terms(SERIES, ["1/4", "1/4", "1/8"], name="v")
        w = dominated_witness(u, v)
        assert w.require(Fraction(1, 4)) == Fraction(3, 8)
        for r in (Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(19, 32)):
            assert w.check_exact(r)

    def test_domination_violated(self):
        u = LscReal.from_terms(SERIES, ["0", "1/2"])
        v = LscReal.from_terms(SERIES, ["1", "1/4"])
        with pytest.raises(DominationViolated) as exc:
            dominated_witness(u, v)
        assert exc.value.index == 1

    def test_dominated_expects_series(self, halving):
        with pytest.raises(ValueError):
            dominated_witness(halving, halving)


class TestCompose:
    def test_transitivity(self, sum_pair):
        alpha, rho = sum_pair
        inner = witness_from_sum(alpha, rho)
        outer = witness_from_sum(inner.beta, LscReal.constant("1/8"))
        w = compose_witnesses(inner, outer)
        assert w.constant == 1
        assert w.alpha is alpha
        assert w.beta.limit == Fraction(7, 8)
        for r in (Fraction(1, 2), Fraction(3, 4), Fraction(13, 16)):
            assert w.check_exact(r)

    def test_constants_multiply(self, sum_pair):
        alpha, _ = sum_pair
        inner = witness_against_scale(alpha, alpha, 2, alpha)
        outer = witness_against_scale(alpha, alpha, 3, scale(alpha, 2))
        assert compose_witnesses(inner, outer).constant == 6


class TestSplitAlong:
    def test_randomized_instances(self, rng):
        for _ in range(50):
            v, alpha, q = algo.random_split_instance(rng)
            rho = scale(seq_from_series(v), 1 - q)
            w = witness_from_sum(alpha, rho)
            u = split_along(v, w)
            terms = u.prefix(200)
            vs = v.prefix(200)
            assert all(0 <= t <= s for t, s in zip(terms[1:], vs[1:]))
            assert abs(sum(terms, Fraction(0)) - alpha.limit) < pow2(25)
            for step in u.steps:
                assert step.A <= alpha.limit
                assert alpha.limit - step.A <= v.limit - step.B
            assert sum(u.case_counts.values()) == len(u.steps)

    def test_rejects_non_series(self, halving):
        with pytest.raises(ValueError):
            split_along(halving, identity_witness(halving))

    def test_rejects_scaled_witness(self, sum_pair):
        alpha, _ = sum_pair
        v = LscReal.from_terms(SERIES, ["1/2", "1/2"])
        with pytest.raises(ValueError):
            split_along(v, witness_against_scale(alpha, alpha, 2, alpha))

    def test_last_step_needs_exact_alpha(self):
        v = LscReal.from_terms(SERIES, ["1/2", "1/2"])

        def half_below_one(r, fuel):
            return Verdict.confirmed(r / 2) if r < 1 else Verdict.pending()

        alpha = LscReal.from_terms(SEQUENCE, ["1/4", "1/2"], known_sup="1/2", name="alpha")
        u = split_along(v, ReductionWitness(half_below_one, alpha=alpha))
        assert u.prefix(2) == [Fraction(1, 4), Fraction(1, 4)]
        assert u.steps[0].B == 1
        bare = split_along(v, ReductionWitness(half_below_one))
        assert bare.prefix(1) == [Fraction(1, 4)]
        with pytest.raises(PendingError):
            bare.prefix(2)

    def test_log_summary(self):
        v = LscReal.from_terms(SERIES, ["1/2", "1/4"])
        u = split_along(v, identity_witness(seq_from_series(v)))
        assert u.get_log_summary() == "No steps taken yet."
        u.prefix(2)
        assert "case (2)" in u.get_log_summary()


class TestWeightedComplete:
    def test_stage_values_and_limit(self, halving, quarter_series):
        s = weighted_complete([halving, seq_from_series(quarter_series)], ["1/2", "1/4"])
        assert s.limit == Fraction(5, 8)
        assert s.approx(0) == Fraction(1, 4)
        assert s.approx(2) == Fraction(1, 2) * halving.approx(1)

    def test_witness_for_each_real(self, halving, quarter_series):
        s = weighted_complete([halving, seq_from_series(quarter_series)], ["1/2", "1/4"])
        w0 = s.witness(0)
        assert w0.constant == 2
        for r in (Fraction(1, 2), Fraction(1), Fraction(9, 8)):
            assert w0.check_exact(r)
        assert s.witness(1).constant == 4
        with pytest.raises(IndexError):
            s.witness(2)

    def test_invalid_inputs(self, halving):
        with pytest.raises(SemirealError):
            weighted_complete([halving], ["0"])
        with pytest.raises(SemirealError):
            weighted_complete([halving, halving], ["3/4", "1/2"])
        with pytest.raises(SemirealError):
            weighted_complete([LscReal(SEQUENCE, lambda n: Fraction(n))], ["1/2"])
        with pytest.raises(SemirealError):
            weighted_complete([], [])


class TestOmegaWithSum:
    def test_excess_goes_to_index_zero(self, halving):
        m = Semimeasure.from_weights({1: "1/4", 2: "1/8"})
        total = m.as_real()
        rho = LscReal(SEQUENCE, lambda n: halving.approx(n) - Fraction(3, 8), limit=Fraction(5, 8))
        w = witness_from_sum(total, rho)
        shifted = omega_with_sum(m, halving, w)
        assert shifted.weight(1, 60) == Fraction(1, 4)
        assert shifted.weight(0, 60) == Fraction(5, 8) - pow2(61)
        assert shifted.total(60) == 1 - pow2(61)
        assert shifted.limit == 1
