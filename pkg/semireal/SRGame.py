"""
The prediction game against an increasing sequence.

The observer watches a_0, a_1, ... and may at any time predict that the
sequence will never increase by more than delta from its current value. A
prediction is violated as soon as some later a_j exceeds a_i + delta; a new
prediction may only be made when none is active. The observer wins if some
prediction stands forever while the deltas add up to less than epsilon.

A computable winning strategy exists exactly when the limit is not random.
Strategies here are built from covers (and back), for sums of two reals, and
for W-sets of terms of a series.
"""
from __future__ import annotations
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Dict, Iterable, List, Optional, Set, Union

from .SRCover import (
    CLOSED,
    Cover,
    Interval,
    contains,
    contiguous_extent,
    covered_measure_between,
    covered_terms,
)
from .SRExceptions import InvariantBroken, LengthBudgetExceeded, StrategyOverspent, WeightOverflow
from .SRPainter import painter
from .SRReal import FuelLike, LscReal, QLike, format_q, lsc_sum, pow2, steps_of, to_q

logger = logging.getLogger(__name__)

ACTIVE = "active"
VIOLATED = "violated"
STANDING = "standing"


@dataclass
class Prediction:
    """A bet that the sequence never exceeds ``base_value + delta``."""

    base_index: int
    base_value: Fraction
    delta: Fraction
    status: str = ACTIVE
    violated_at: Optional[int] = None

    @property
    def ceiling(self) -> Fraction:
        return self.base_value + self.delta

    def to_dict(self) -> Dict[str, Any]:
        data = {
            "base_index": self.base_index,
            "base_value": format_q(self.base_value),
            "delta": format_q(self.delta),
            "status": self.status,
        }
        if self.violated_at is not None:
            data["violated_at"] = self.violated_at
        return data


@dataclass
class GameTrace:
    """
    History of one game.

    Attributes:
        predictions: All predictions in order of issue.
        epsilon: The bound the deltas must stay under.
        delta_total: Sum of all deltas issued.
        steps: Approximations read.
        won_so_far: The last prediction stands and delta_total < epsilon.
        logs: Event log.
    """

    epsilon: Fraction
    predictions: List[Prediction] = field(default_factory=list)
    delta_total: Fraction = Fraction(0)
    steps: int = 0
    won_so_far: bool = False
    logs: List[str] = field(default_factory=list)

    def log(self, message: str):
        self.logs.append(message)

    @property
    def active(self) -> Optional[Prediction]:
        if self.predictions and self.predictions[-1].status in (ACTIVE, STANDING):
            return self.predictions[-1]
        return None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "epsilon": format_q(self.epsilon),
            "delta_total": format_q(self.delta_total),
            "steps": self.steps,
            "won_so_far": self.won_so_far,
            "predictions": [p.to_dict() for p in self.predictions],
        }


class Strategy:
    """
    Base class of observer strategies.

    ``propose`` is called only when no prediction is active and returns the
    delta of a new prediction, or None to wait. ``on_violation`` is told about
    every violated prediction. Strategies are deterministic; their mutable
    state round-trips through ``state_dict``/``load_state`` so long games can
    be checkpointed.
    """

    kind = "strategy"

    def propose(self, trace: GameTrace, index: int, value: Fraction) -> Optional[Fraction]:
        raise NotImplementedError

    def on_violation(self, prediction: Prediction, index: int, value: Fraction) -> None:
        pass

    def state_dict(self) -> Dict[str, Any]:
        return {}

    def load_state(self, state: Dict[str, Any]) -> None:
        pass

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind, "state": self.state_dict()}


class ConstantStrategy(Strategy):
    """Predict the same delta whenever allowed."""

    kind = "constant"

    def __init__(self, delta: QLike):
        self.delta = to_q(delta)
        if self.delta < 0:
            raise ValueError(f"delta must be non-negative, got {self.delta}")

    def propose(self, trace, index, value):
        return self.delta

    def state_dict(self):
        return {"delta": format_q(self.delta)}


class CoverStrategy(Strategy):
    """
    Wait until the current approximation is covered, then predict the maximal
    delta such that ``[a_i, a_i + delta)`` is covered completely.

    The cover is read with the game step as fuel.
    """

    kind = "from-cover"

    def __init__(self, cover: Cover):
        self.cover = cover
        self.proposals = 0

    def propose(self, trace, index, value):
        extent = contiguous_extent(value, self.cover.emitted(index + 1))
        if extent is None or extent == 0:
            return None
        self.proposals += 1
        return extent

    def state_dict(self):
        return {"proposals": self.proposals}

    def load_state(self, state):
        self.proposals = int(state.get("proposals", 0))


@dataclass
class LedgerEntry:
    """Bookkeeping of one sum-strategy prediction."""

    index: int
    a_value: Fraction
    b_value: Fraction
    h: Fraction
    k: Fraction
    delta: Fraction
    charged_to: Optional[str] = None
    charge: Optional[Fraction] = None


class SumStrategy(Strategy):
    """
    Strategy against a_i + b_i from covers of the two limits.

    Waits until a_i and b_i are both covered, takes the contiguous coverage
    h right of a_i and k right of b_i, and predicts delta = 2*min(h, k). When a
    prediction is violated, one of the two sequences moved by more than
    min(h, k) through covered ground; that covered measure (at least delta/2)
    is charged to the coordinate that moved, and the charge is asserted.

    Attributes:
        ledger (List[LedgerEntry]): One entry per prediction.
    """

    kind = "sum"

    def __init__(self, cov_a: Cover, cov_b: Cover, a: LscReal, b: LscReal):
        self.cov_a = cov_a
        self.cov_b = cov_b
        self.a = a
        self.b = b
        self.ledger: List[LedgerEntry] = []
        self._snapshots: Dict[int, Any] = {}

    @property
    def stream(self) -> LscReal:
        """The termwise sum the game is played against."""
        return lsc_sum(self.a, self.b)

    def propose(self, trace, index, value):
        ia = self.cov_a.emitted(index + 1)
        ib = self.cov_b.emitted(index + 1)
        ai, bi = self.a.approx(index), self.b.approx(index)
        h = contiguous_extent(ai, ia)
        k = contiguous_extent(bi, ib)
        if not h or not k:
            return None
        delta = 2 * min(h, k)
        self.ledger.append(LedgerEntry(index, ai, bi, h, k, delta))
        self._snapshots[len(self.ledger) - 1] = (ia, ib)
        return delta

    def on_violation(self, prediction, index, value):
        entry = self.ledger[-1]
        ia, ib = self._snapshots.pop(len(self.ledger) - 1)
        aj, bj = self.a.approx(index), self.b.approx(index)
        burnt_a = covered_measure_between(entry.a_value, aj, ia)
        burnt_b = covered_measure_between(entry.b_value, bj, ib)
        half = entry.delta / 2
        if burnt_a >= half:
            entry.charged_to, entry.charge = "a", burnt_a
        elif burnt_b >= half:
            entry.charged_to, entry.charge = "b", burnt_b
        else:
            raise InvariantBroken(
                f"Prediction at {entry.index} violated at {index} but only "
                f"{format_q(max(burnt_a, burnt_b))} < {format_q(half)} of coverage was crossed"
            )

    def state_dict(self):
        return {
            "ledger": [
                {
                    "index": e.index,
                    "h": format_q(e.h),
                    "k": format_q(e.k),
                    "delta": format_q(e.delta),
                    "charged_to": e.charged_to,
                }
                for e in self.ledger
            ]
        }


def play(s: Strategy, a: LscReal, epsilon: QLike, fuel: FuelLike) -> GameTrace:
    """
    Play ``fuel`` rounds of the prediction game.

    Each round reads a_i, marks the active prediction violated if a_i passed
    its ceiling, and asks the strategy for a new prediction when none is
    active. At the end the last unviolated prediction is marked standing; the
    trace is a win so far if it stands and the deltas total less than epsilon.
    A win is never claimed outright: a standing prediction may fall later.

    Raises:
        StrategyOverspent: If the strategy predicts after delta_total reached epsilon.
    """
    eps = to_q(epsilon)
    if eps <= 0:
        raise ValueError(f"epsilon must be positive, got {eps}")
    trace = GameTrace(eps)
    active: Optional[Prediction] = None
    for i in range(steps_of(fuel)):
        ai = a.approx(i)
        trace.steps = i + 1
        if active is not None and ai > active.ceiling:
            active.status = VIOLATED
            active.violated_at = i
            trace.log(f"round {i}: a={format_q(ai)} violates prediction from round {active.base_index}")
            s.on_violation(active, i, ai)
            active = None
        if active is None:
            delta = s.propose(trace, i, ai)
            if delta is None:
                continue
            delta = to_q(delta)
            if delta < 0:
                raise ValueError(f"Strategy proposed a negative delta {delta}")
            if trace.delta_total >= eps:
                raise StrategyOverspent(
                    f"Round {i}: deltas already total {format_q(trace.delta_total)} >= epsilon {format_q(eps)}"
                )
            active = Prediction(i, ai, delta)
            trace.predictions.append(active)
            trace.delta_total += delta
            trace.log(f"round {i}: predict a stays <= {format_q(active.ceiling)}")
    if active is not None:
        active.status = STANDING
    trace.won_so_far = active is not None and trace.delta_total < eps
    logger.debug("game over %d rounds: %d predictions, won so far: %s", trace.steps, len(trace.predictions), trace.won_so_far)
    return trace


def strategy_from_cover(c: Cover) -> CoverStrategy:
    """The observer strategy that follows the contiguous coverage of ``c``."""
    return CoverStrategy(c)


def cover_from_strategy(s: Strategy, a: LscReal, epsilon: QLike, fuel: FuelLike) -> Cover:
    """
    The closed prediction intervals ``[a_i, a_i + delta]`` of a game, with budget epsilon.

    Raises:
        LengthBudgetExceeded: When the strategy overspends.
    """
    try:
        trace = play(s, a, epsilon, fuel)
    except StrategyOverspent as exc:
        raise LengthBudgetExceeded(str(exc)) from exc
    intervals = [Interval(p.base_value, p.ceiling, CLOSED) for p in trace.predictions]
    return Cover.from_intervals(intervals, length_budget=to_q(epsilon), name="predictions")


def sum_strategy(cov_a: Cover, cov_b: Cover, a: LscReal, b: LscReal) -> SumStrategy:
    """Strategy for a + b from covers of a and b; play it against ``.stream``."""
    return SumStrategy(cov_a, cov_b, a, b)


@dataclass
class FamilyLevel:
    """One level of :func:`shifted_prediction_family`."""

    level: int
    epsilon: Fraction
    contained: bool
    trace: GameTrace

    def to_dict(self) -> Dict[str, Any]:
        return {
            "level": self.level,
            "epsilon": format_q(self.epsilon),
            "contained": self.contained,
            "won_so_far": self.trace.won_so_far,
        }


def shifted_prediction_family(
    cover_factory: Callable[[int], Cover],
    a: LscReal,
    levels: int,
    fuel: FuelLike,
) -> List[FamilyLevel]:
    """
    Run the epsilon = 2^-k family of games for k = 0 .. levels-1.

    ``cover_factory(k)`` supplies the k-th cover, of total length below 2^-k.
    Each level records whether the cover is seen to contain the limit and the
    game played with the cover strategy.
    """
    out = []
    for k in range(levels):
        eps = pow2(k)
        cover = cover_factory(k)
        trace = play(strategy_from_cover(cover), a, eps, fuel)
        out.append(FamilyLevel(k, eps, contains(cover, a, fuel).is_confirmed, trace))
    return out


IndexSet = Union[Set[int], Callable[[int], bool]]


def _member(W: IndexSet, i: int) -> bool:
    return W(i) if callable(W) else i in W


def wset_check(d: LscReal, W: IndexSet, epsilon: QLike, fuel: FuelLike, doubling: bool = False) -> Cover:
    """
    Cover built from a set W of term indices.

    Painter i starts at d_0 + ... + d_{i-1} with paint d_i for i in W and none
    otherwise. With ``doubling`` every painter gets twice the paint.

    Raises:
        WeightOverflow: If the terms of W among the first ``fuel`` weigh epsilon or more.
    """
    eps = to_q(epsilon)
    steps = steps_of(fuel)
    weight = sum((d.term(i) for i in range(steps) if _member(W, i)), Fraction(0))
    if weight >= eps:
        raise WeightOverflow(f"Terms in W weigh {format_q(weight)} >= {format_q(eps)}")
    starts = LscReal(
        "sequence",
        lambda i: d.approx(i - 1) if i > 0 else Fraction(0),
        limit=d.limit,
        name=f"starts({d.name})",
    )
    paint = [d.term(i) if _member(W, i) else Fraction(0) for i in range(steps)]
    result = painter(starts, paint, steps, doubling=doubling)
    cover = result.cover()
    cover.length_budget = 2 * eps if doubling else eps
    return cover


def wset_from_cover(d: LscReal, c: Cover, fuel: FuelLike) -> Set[int]:
    """Indices i < fuel whose closed term interval lies inside one emitted interval."""
    steps = steps_of(fuel)
    return set(covered_terms(d, c.emitted(steps), steps))


def wset_intersection(w1: Iterable[int], w2: Iterable[int]) -> Set[int]:
    """Common indices of two W-sets, the W-set criterion for a sum of two reals."""
    return set(w1) & set(w2)
