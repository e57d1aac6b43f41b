"""
The interval-shifting race between two lower semicomputable reals.

The increments of alpha are laid end to end along the approximations of beta:
the k-th increase a_{k+1} - a_k becomes a closed interval starting at the
current b, and the race waits for an approximation of beta to the right of it.
Either some interval is never left (the intervals cover beta, so beta is not
random) or the race goes on forever and the gaps between the intervals form a
computable series that adds up to beta - alpha.
"""
from __future__ import annotations
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List

from .SRCover import CLOSED, Cover, Interval
from .SRReal import SERIES, FuelLike, LscReal, format_q, pow2, scale, steps_of

logger = logging.getLogger(__name__)

# The k-th shifted interval grows by 2^-(k + ENLARGEMENT_SHIFT) on each side
# when turned into an open cover.
ENLARGEMENT_SHIFT = 10


@dataclass
class RaceOutcome:
    """
    Result of :func:`race`.

    Attributes:
        status: ``"cover-produced"`` once beta is proven never to leave the
            current interval, ``"reducing-so-far"`` otherwise.
        intervals: The shifted closed intervals, in order.
        holes: The hole series: b_0 - a_0 followed by the gap left before each
            new interval.
        steps: Number of beta approximations read.
        fuel_exhausted: True when the race stopped because the fuel ran out.
        logs: Step log.
    """

    status: str
    intervals: List[Interval] = field(default_factory=list)
    holes: List[Fraction] = field(default_factory=list)
    steps: int = 0
    fuel_exhausted: bool = False
    logs: List[str] = field(default_factory=list)

    COVER_PRODUCED = "cover-produced"
    REDUCING = "reducing-so-far"

    def log(self, message: str):
        self.logs.append(message)

    @property
    def cover_produced(self) -> bool:
        return self.status == self.COVER_PRODUCED

    def total_length(self) -> Fraction:
        return sum((iv.length for iv in self.intervals), Fraction(0))

    def holes_series(self) -> LscReal:
        """The holes as a series; its partial sums approach beta - alpha."""
        return LscReal.from_terms(SERIES, self.holes or [0], name="holes")

    def cover(self) -> Cover:
        """The shifted closed intervals as a cover."""
        return Cover.from_intervals(self.intervals, length_budget=self.total_length(), name="race")

    def to_open_cover(self) -> Cover:
        """Open cover: the k-th interval is enlarged by 2^-(k+10) on each side."""
        out = []
        budget = Fraction(0)
        for k, iv in enumerate(self.intervals):
            radius = pow2(k + ENLARGEMENT_SHIFT)
            out.append(iv.enlarged(radius))
            budget += iv.length + 2 * radius
        return Cover.from_intervals(out, length_budget=budget, name="race-open")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "status": self.status,
            "steps": self.steps,
            "fuel_exhausted": self.fuel_exhausted,
            "intervals": [iv.to_dict() for iv in self.intervals],
            "holes": [format_q(h) for h in self.holes],
            "total_length": format_q(self.total_length()),
        }


def _pins_beta(beta: LscReal, iv: Interval, b: Fraction) -> bool:
    return beta.known_sup is not None and iv.contains_point(b) and beta.known_sup <= iv.right


def race(alpha: LscReal, beta: LscReal, fuel: FuelLike) -> RaceOutcome:
    """
    Run the shifting construction on ``fuel`` approximations of beta.

    The result is CoverProduced only when beta's ``known_sup`` proves that the
    current interval is never left, so more fuel never turns a produced cover
    back into a running race.
    """
    steps = steps_of(fuel)
    outcome = RaceOutcome(RaceOutcome.REDUCING)
    if steps == 0:
        outcome.fuel_exhausted = True
        return outcome

    b = beta.approx(0)
    outcome.holes.append(b - alpha.approx(0))
    k = 0
    current = Interval(b, b + alpha.approx(1) - alpha.approx(0), CLOSED)
    outcome.intervals.append(current)
    outcome.steps = 1
    outcome.log(f"interval 0 placed at {current}")

    i = 0
    while True:
        if _pins_beta(beta, current, b):
            outcome.status = RaceOutcome.COVER_PRODUCED
            outcome.log(f"beta <= {format_q(beta.known_sup)} never leaves {current}")
            break
        if i + 1 >= steps:
            outcome.fuel_exhausted = True
            break
        i += 1
        b = beta.approx(i)
        outcome.steps = i + 1
        if b > current.right:
            gap = b - current.right
            outcome.holes.append(gap)
            k += 1
            current = Interval(b, b + alpha.approx(k + 1) - alpha.approx(k), CLOSED)
            outcome.intervals.append(current)
            outcome.log(f"b_{i} = {format_q(b)}: hole {format_q(gap)}, interval {k} placed at {current}")
    logger.debug("race %s vs %s: %s after %d steps", alpha.name, beta.name, outcome.status, outcome.steps)
    return outcome


def race_family(alpha: LscReal, beta: LscReal, levels: int, fuel: FuelLike) -> List[RaceOutcome]:
    """Race alpha/2^k against beta for k = 0 .. levels-1."""
    return [race(scale(alpha, pow2(k)), beta, fuel) for k in range(levels)]
