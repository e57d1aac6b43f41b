"""
Constructive one-reducibility between lower semicomputable reals.

alpha <=_1 beta means that beta - alpha is lower semicomputable. The evidence is
a :class:`ReductionWitness`: a reduction function phi that maps every rational
r < c*beta to phi(r) <= alpha with alpha - phi(r) <= c*beta - r.

This module builds witnesses from a sum presentation, from termwise domination
and from weighted sums, recovers beta - alpha from a witness, splits a series
along a witness, and adds a lower semicomputable excess to a semimeasure so that
its total becomes a given real.
"""
from __future__ import annotations
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import count
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple

from .SRExceptions import (
    DominationViolated,
    InvariantBroken,
    PendingError,
    SemirealError,
)
from .SRMachine import Semimeasure
from .SRReal import (
    DEFAULT_STALL_LIMIT,
    SEQUENCE,
    SERIES,
    FuelLike,
    LscReal,
    QLike,
    Verdict,
    format_q,
    lsc_sum,
    scale,
    seq_from_series,
    steps_of,
    to_q,
)

logger = logging.getLogger(__name__)

DEFAULT_PHI_FUEL = 10_000

PhiFunction = Callable[[Fraction, int], Verdict]


class ReductionWitness:
    """
    Evidence for alpha <=_1 c*beta.

    Args:
        phi: Budgeted reduction function ``(r, fuel) -> Verdict``.
        rho: The difference c*beta - alpha as a real, when it is available.
        constant (int): The positive integer c.
        alpha, beta: The presentations the witness talks about.
        name (str): Label.
    """

    def __init__(
        self,
        phi: PhiFunction,
        rho: Optional[LscReal] = None,
        constant: int = 1,
        alpha: Optional[LscReal] = None,
        beta: Optional[LscReal] = None,
        name: str = "witness",
    ):
        if constant < 1 or int(constant) != constant:
            raise ValueError(f"Witness constant must be a positive integer, got {constant}")
        self.phi = phi
        self.rho = rho
        self.constant = int(constant)
        self.alpha = alpha
        self.beta = beta
        self.name = name

    def query(self, r: QLike, fuel: FuelLike = DEFAULT_PHI_FUEL) -> Verdict:
        """Evaluate phi(r) within ``fuel``."""
        return self.phi(to_q(r), steps_of(fuel))

    def require(self, r: QLike, fuel: FuelLike = DEFAULT_PHI_FUEL) -> Fraction:
        """
        Evaluate phi(r) or fail.

        Raises:
            PendingError: If phi(r) is still pending after ``fuel``.
        """
        verdict = self.query(r, fuel)
        if not verdict.is_confirmed:
            raise PendingError(f"{self.name}: phi({format_q(to_q(r))}) pending after {steps_of(fuel)} steps")
        return verdict.payload

    def check_exact(
        self,
        r: QLike,
        fuel: FuelLike = DEFAULT_PHI_FUEL,
        alpha_limit: Optional[QLike] = None,
        beta_limit: Optional[QLike] = None,
    ) -> bool:
        """
        Check the witness inequality at ``r`` against exact limits.

        A pending phi(r) passes vacuously. The limits default to the ``limit``
        metadata of ``alpha`` and ``beta``.

        Raises:
            ValueError: If a limit is unknown.
        """
        if alpha_limit is None and self.alpha is not None:
            alpha_limit = self.alpha.limit
        if beta_limit is None and self.beta is not None:
            beta_limit = self.beta.limit
        if alpha_limit is None or beta_limit is None:
            raise ValueError("check_exact needs the exact limits of alpha and beta")
        a_lim, b_lim = to_q(alpha_limit), to_q(beta_limit)
        verdict = self.query(r, fuel)
        if not verdict.is_confirmed:
            return True
        value = verdict.payload
        return value <= a_lim and a_lim - value <= self.constant * b_lim - to_q(r)

    def against_scaled_beta(self) -> "ReductionWitness":
        """The same phi read as a constant-1 witness against c*beta."""
        if self.constant == 1:
            return self
        if self.beta is None:
            raise ValueError("Witness has no beta presentation to scale")
        return ReductionWitness(
            self.phi,
            rho=self.rho,
            constant=1,
            alpha=self.alpha,
            beta=scale(self.beta, self.constant),
            name=f"{self.name}*",
        )

    def __repr__(self) -> str:
        return f"ReductionWitness({self.name}, c={self.constant})"


class _SumScanner:
    """phi(s) = a_n for the first stage n with a_n + r_n > s, scanned incrementally."""

    def __init__(self, alpha: LscReal, rho: LscReal):
        self.alpha = alpha
        self.rho = rho
        self._scanned: Dict[Fraction, int] = {}
        self._found: Dict[Fraction, Tuple[int, Fraction]] = {}

    def __call__(self, s: Fraction, fuel: int) -> Verdict:
        hit = self._found.get(s)
        if hit is not None:
            stage, value = hit
            return Verdict.confirmed(value) if stage < fuel else Verdict.pending()
        start = self._scanned.get(s, 0)
        for n in range(start, fuel):
            a_n = self.alpha.approx(n)
            if a_n + self.rho.approx(n) > s:
                self._found[s] = (n, a_n)
                self._scanned.pop(s, None)
                return Verdict.confirmed(a_n)
        self._scanned[s] = max(start, fuel)
        return Verdict.pending()


def witness_from_sum(alpha: LscReal, rho: LscReal) -> ReductionWitness:
    """
    Witness for alpha <=_1 alpha + rho.

    phi(s) waits for the first stage n with a_n + r_n > s and returns a_n; it
    stays pending for s >= alpha + rho, so callers only query below the sum.

    Example:
        >>> a = LscReal.geometric("1/2", "1/2", "1/2")
        >>> r = LscReal.geometric("1/4", "1/4", "1/2")
        >>> w = witness_from_sum(a, r)
        >>> w.check_exact(Fraction(5, 8))
        True
    """
    return ReductionWitness(
        _SumScanner(alpha, rho),
        rho=rho,
        constant=1,
        alpha=alpha,
        beta=lsc_sum(alpha, rho),
        name=f"sum-witness({alpha.name},{rho.name})",
    )


def identity_witness(alpha: LscReal) -> ReductionWitness:
    """phi(r) = r, witnessing alpha <=_1 alpha for any presentation of the same limit."""
    zero = LscReal.from_terms(SERIES, [0], name="0")
    return ReductionWitness(
        lambda r, fuel: Verdict.confirmed(r),
        rho=zero,
        constant=1,
        alpha=alpha,
        beta=alpha,
        name=f"identity({alpha.name})",
    )


def witness_against_scale(alpha: LscReal, beta: LscReal, c: int, rho: LscReal) -> ReductionWitness:
    """
    Witness for alpha <=_1 c*beta given rho with alpha + rho = c*beta.

    The constant stays in the witness; the presentation of beta is not scaled.
    """
    return ReductionWitness(
        _SumScanner(alpha, rho),
        rho=rho,
        constant=c,
        alpha=alpha,
        beta=beta,
        name=f"scaled-witness({alpha.name},{c}*{beta.name})",
    )


def compose_witnesses(inner: ReductionWitness, outer: ReductionWitness) -> ReductionWitness:
    """
    Transitivity: from alpha <=_1 c1*beta and beta <=_1 c2*gamma build alpha <=_1 c1*c2*gamma.

    The composed map is r -> phi_inner(c1 * phi_outer(r / c1)).
    """
    c1, c2 = inner.constant, outer.constant

    def phi(r: Fraction, fuel: int) -> Verdict:
        mid = outer.phi(r / c1, fuel)
        if not mid.is_confirmed:
            return mid
        return inner.phi(c1 * mid.payload, fuel)

    rho = None
    if c1 == 1 and c2 == 1 and inner.rho is not None and outer.rho is not None:
        rho = lsc_sum(inner.rho, outer.rho)
    return ReductionWitness(
        phi,
        rho=rho,
        constant=c1 * c2,
        alpha=inner.alpha,
        beta=outer.beta,
        name=f"({inner.name})o({outer.name})",
    )


def diff_to_lsc(w: ReductionWitness, beta: LscReal, stall_limit: int = DEFAULT_STALL_LIMIT) -> LscReal:
    """
    Recover beta - alpha from a witness for alpha <=_1 beta.

    At stage n the value b_n joins a pending list (equal values are queried
    once) and every pending value s is retried with fuel n+1; each confirmed
    phi(s) contributes s - phi(s) <= beta - alpha. The output is the running
    maximum of the contributions. Stages before the first confirmation emit
    nothing; more than ``stall_limit`` such stages raise PendingError.

    Raises:
        ValueError: If the witness constant is not 1.
    """
    if w.constant != 1:
        raise ValueError("diff_to_lsc needs a constant-1 witness; use against_scaled_beta()")

    def hull() -> Iterator[Fraction]:
        best: Optional[Fraction] = None
        pending: List[Fraction] = []
        seen = set()
        idle = 0
        for n in count():
            b = beta.approx(n)
            if b not in seen:
                seen.add(b)
                pending.append(b)
            still = []
            for s in pending:
                verdict = w.query(s, n + 1)
                if verdict.is_confirmed:
                    x = s - verdict.payload
                    if best is None or x > best:
                        best = x
                else:
                    still.append(s)
            pending = still
            if best is None:
                idle += 1
                if idle > stall_limit:
                    raise PendingError(f"diff_to_lsc: no phi(b_n) confirmed in {stall_limit} stages")
                continue
            yield best

    limit = None
    if w.alpha is not None and w.alpha.limit is not None and beta.limit is not None:
        limit = beta.limit - w.alpha.limit
    return LscReal(SEQUENCE, hull(), limit=limit, name=f"diff({w.name})")


def dominated_witness(u: LscReal, v: LscReal, check_prefix: int = 32) -> ReductionWitness:
    """
    Witness for sum(u) <=_1 sum(v) when u_i <= v_i for all i > 0.

    The difference series v_i - u_i is checked lazily; the first
    ``check_prefix`` terms are checked right away.

    Raises:
        DominationViolated: At the first index i > 0 with u_i > v_i.
    """
    if u.kind != SERIES or v.kind != SERIES:
        raise ValueError("dominated_witness expects two series")

    def differences() -> Iterator[Fraction]:
        for i in count():
            ui, vi = u.term(i), v.term(i)
            if i > 0 and ui > vi:
                raise DominationViolated(i)
            yield vi - ui

    limit = None
    if u.limit is not None and v.limit is not None:
        limit = v.limit - u.limit
    rho = LscReal(SERIES, differences(), limit=limit, name=f"({v.name}-{u.name})")
    rho.prefix(check_prefix)
    w = witness_from_sum(seq_from_series(u), rho)
    w.beta = seq_from_series(v)
    w.name = f"dominated({u.name},{v.name})"
    return w


@dataclass
class SplitStep:
    """One step of :class:`SeriesSplitter`: the case taken and the partial sums after it."""

    index: int
    case: int
    u: Fraction
    A: Fraction
    B: Fraction


class SeriesSplitter(LscReal):
    """
    The series u built by :func:`split_along`, with its construction record.

    Attributes:
        steps (List[SplitStep]): Case and partial sums after every step.
        case_counts (Dict[int, int]): How many steps took cases 1, 2 and 3.
        logs (List[str]): Human-readable log.

    Args:
        v: A series whose exact sum is ``v.limit``.
        w: A constant-1 witness for alpha <=_1 sum(v). Once B reaches
            ``v.limit`` phi is not queried and ``w.alpha.limit`` is used, so
            a witness without an exact alpha falls back to querying phi at
            the sum itself, where it need not be defined.
        phi_fuel: Fuel for each query of phi.
        name: Label.

    Raises:
        ValueError: If v is not a series or w has a constant other than 1.
        PendingError: When a term is read and phi stays pending, in
            particular at the sum of v when either limit is unknown.
        InvariantBroken: If A overshoots alpha or falls behind B.
    """

    def __init__(self, v: LscReal, w: ReductionWitness, phi_fuel: int = DEFAULT_PHI_FUEL, name: str = ""):
        if w.constant != 1:
            raise ValueError("split_along needs a constant-1 witness")
        if v.kind != SERIES:
            raise ValueError("split_along splits a series")
        self.v = v
        self.w = w
        self.phi_fuel = phi_fuel
        self.steps: List[SplitStep] = []
        self.case_counts: Dict[int, int] = {1: 0, 2: 0, 3: 0}
        self.logs: List[str] = []
        self._alpha_limit = w.alpha.limit if w.alpha is not None else None
        self._beta_limit = v.limit
        super().__init__(SERIES, self._generate(), limit=self._alpha_limit, name=name or f"split({v.name})")

    def log(self, message: str):
        self.logs.append(message)

    def get_log_summary(self) -> str:
        if not self.logs:
            return "No steps taken yet."
        return "\n".join(self.logs)

    def _check(self, i: int, A: Fraction, B: Fraction) -> None:
        if self._alpha_limit is None or self._beta_limit is None:
            return
        if A > self._alpha_limit or self._alpha_limit - A > self._beta_limit - B:
            raise InvariantBroken(
                f"Step {i}: A={format_q(A)}, B={format_q(B)} break A <= alpha and alpha-A <= beta-B"
            )

    def _phi(self, B: Fraction) -> Fraction:
        # phi is only defined below the sum; at the sum itself the answer is alpha
        if self._beta_limit is not None and self._alpha_limit is not None and B >= self._beta_limit:
            return self._alpha_limit
        return self.w.require(B, self.phi_fuel)

    def _generate(self) -> Iterator[Fraction]:
        B = self.v.term(0)
        A = self._phi(B)
        self._check(0, A, B)
        self.log(f"step 0: u_0 = phi({format_q(B)}) = {format_q(A)}")
        yield A
        for i in count(1):
            vi = self.v.term(i)
            B_next = B + vi
            A_next = A if vi == 0 else self._phi(B_next)
            if A_next < A:
                case, u = 1, Fraction(0)
            elif A_next <= A + vi:
                case, u = 2, A_next - A
            else:
                case, u = 3, vi
            if not 0 <= u <= vi:
                raise InvariantBroken(f"Step {i}: u={format_q(u)} outside [0, {format_q(vi)}]")
            A += u
            B = B_next
            self._check(i, A, B)
            self.case_counts[case] += 1
            self.steps.append(SplitStep(i, case, u, A, B))
            self.log(f"step {i}: case ({case}), u_{i} = {format_q(u)}")
            yield u


def split_along(v: LscReal, w: ReductionWitness, phi_fuel: int = DEFAULT_PHI_FUEL) -> SeriesSplitter:
    """
    Split alpha along a series v with alpha <=_1 sum(v).

    Keeps A = u_0 + ... + u_{i-1} below alpha and at least as close to alpha as
    B = v_0 + ... + v_{i-1} is to sum(v). With A' = phi(B + v_i):

    1. A' < A: u_i = 0;
    2. A <= A' <= A + v_i: u_i = A' - A;
    3. A' > A + v_i: u_i = v_i.

    Boundary ties go to the first matching case. When v_i = 0 no query is made
    and the step counts as case 2. Once B reaches the known sum of v, A' is
    the known limit of alpha instead of a query.

    Both limits must be exact: ``v.limit`` and ``w.alpha.limit``. Without
    them the last step of a finite v queries phi at sum(v) itself.

    Raises:
        ValueError: If v is not a series or w has a constant other than 1.
        PendingError: Lazily, when a term needs a phi value that stays pending.
    """
    return SeriesSplitter(v, w, phi_fuel=phi_fuel)


class WeightedSum(LscReal):
    """
    The dovetailed sum of weighted reals, with witnesses alpha_i <=_1 c*alpha on demand.
    """

    def __init__(self, reals: Sequence[LscReal], weights: Sequence[Fraction]):
        self.reals = list(reals)
        self.weights = list(weights)
        k = len(self.reals)

        def stage(n: int) -> Fraction:
            total = Fraction(0)
            for i, (real, wt) in enumerate(zip(self.reals, self.weights)):
                idx = (n - i) // k if n >= i else 0
                total += wt * real.approx(idx)
            return total

        limit = None
        if all(r.limit is not None for r in self.reals):
            limit = sum((wt * r.limit for r, wt in zip(self.reals, self.weights)), Fraction(0))
        sup = sum((wt * r.known_sup for r, wt in zip(self.reals, self.weights)), Fraction(0))
        super().__init__(SEQUENCE, stage, known_sup=sup, limit=limit, name="weighted-sum")

    def witness(self, i: int) -> ReductionWitness:
        """
        Witness for alpha_i <=_1 c*alpha with c = ceil(1/w_i).

        c*alpha - alpha_i = (c*w_i - 1)*alpha_i + c*(sum of the other weighted
        reals), a non-negative combination, so it is lower semicomputable.
        """
        if not 0 <= i < len(self.reals):
            raise IndexError(f"No real with index {i}")
        wi = self.weights[i]
        c = math.ceil(1 / wi)
        own = c * wi - 1
        ai = self.reals[i]
        others = [(r, wt) for j, (r, wt) in enumerate(zip(self.reals, self.weights)) if j != i]

        def rest(n: int) -> Fraction:
            value = own * ai.approx(n)
            for r, wt in others:
                value += c * wt * r.approx(n)
            return value

        limit = None
        if self.limit is not None and ai.limit is not None:
            limit = c * self.limit - ai.limit
        rho = LscReal(SEQUENCE, rest, limit=limit, name=f"rest[{i}]")
        return witness_against_scale(ai, self, c, rho)


def weighted_complete(reals: Sequence[LscReal], weights: Sequence[QLike]) -> WeightedSum:
    """
    The weighted sum alpha = sum w_i * alpha_i of reals in [0, 1].

    Streams are dovetailed round-robin: stage n advances real n mod k.

    Raises:
        SemirealError: For a non-positive weight, weights summing above 1, or a
            real without a known_sup in [0, 1].
    """
    if not reals or len(reals) != len(weights):
        raise SemirealError("Need one weight per real and at least one real")
    ws = [to_q(w) for w in weights]
    for i, w in enumerate(ws):
        if w <= 0:
            raise SemirealError(f"Weight {i} must be positive, got {format_q(w)}")
    if sum(ws, Fraction(0)) > 1:
        raise SemirealError("Weights must sum to at most 1")
    for i, r in enumerate(reals):
        if r.known_sup is None or r.known_sup > 1 or r.approx(0) < 0:
            raise SemirealError(f"Real {i} ({r.name}) is not confined to [0, 1]")
    return WeightedSum(reals, ws)


def omega_with_sum(m: Semimeasure, alpha: LscReal, w: ReductionWitness) -> Semimeasure:
    """
    Rescale a semimeasure so that its total becomes ``alpha``.

    ``w`` witnesses sum(m) <=_1 c*alpha. The excess tau = c*alpha - sum(m) is
    recovered with :func:`diff_to_lsc`; then m'(i) = m(i)/c for i != 0 and
    m'(0) = m(0)/c + max(0, tau)/c, so the total of m' tends to alpha.
    """
    c = w.constant
    scaled = scale(alpha, c)
    excess = diff_to_lsc(
        ReductionWitness(w.phi, rho=w.rho, constant=1, alpha=w.alpha, beta=scaled, name=w.name),
        scaled,
    )

    def excess_at(fuel: int) -> Fraction:
        try:
            value = excess.approx(fuel)
        except PendingError:
            return Fraction(0)
        return max(Fraction(0), value)

    def weight(i: int, fuel: int) -> Fraction:
        base = m.weight(i, fuel) / c
        if i == 0:
            return base + excess_at(fuel) / c
        return base

    def support(fuel: int) -> List[int]:
        return sorted(set(m.support(fuel)) | {0})

    declared = alpha.known_sup if alpha.known_sup is not None else Fraction(1)
    return Semimeasure(weight, support, declared_total=declared, name=f"{m.name}+tau", limit=alpha.limit)
