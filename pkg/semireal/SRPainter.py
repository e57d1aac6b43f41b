"""
The painter construction.

Painter i stands at a_i and owns a (lower semicomputable) amount of paint
h_i. Whenever more paint becomes available it paints rightwards from where it
stopped, skipping ground that is already painted, so no point is painted twice
and the painted measure always equals the paint consumed. If the limit alpha
satisfies alpha <= a_i + h_i + h_{i+1} + ... for some i, alpha ends up painted;
doubling every painter's paint makes that inequality strict.
"""
from __future__ import annotations
import bisect
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Dict, List, Sequence, Tuple, Union

from .SRCover import CLOSED, Cover, Interval
from .SRReal import FuelLike, LscReal, QLike, format_q, steps_of, to_q

logger = logging.getLogger(__name__)

PaintSource = Union[Sequence[QLike], Sequence[LscReal], Callable[[int, int], QLike]]


def _paint_reader(h: PaintSource) -> Callable[[int, int], Fraction]:
    """Normalise h to ``(painter, stage) -> paint available so far``."""
    if callable(h):
        return lambda i, t: to_q(h(i, t))

    def read(i: int, t: int) -> Fraction:
        if i >= len(h):
            return Fraction(0)
        item = h[i]
        if isinstance(item, LscReal):
            return item.approx(t - i)
        return to_q(item)

    return read


@dataclass
class PaintResult:
    """
    Outcome of :func:`painter`.

    Attributes:
        pieces: Closed painted pieces with the stage they were painted at.
        consumed: Paint used so far by each painter.
        logs: Painting log.
    """

    pieces: List[Tuple[int, Interval]] = field(default_factory=list)
    consumed: List[Fraction] = field(default_factory=list)
    doubling: bool = True
    logs: List[str] = field(default_factory=list)

    def log(self, message: str):
        self.logs.append(message)

    @property
    def painted_measure(self) -> Fraction:
        return sum((iv.length for _, iv in self.pieces), Fraction(0))

    @property
    def total_consumed(self) -> Fraction:
        return sum(self.consumed, Fraction(0))

    def is_painted(self, x: QLike) -> bool:
        q = to_q(x)
        return any(iv.contains_point(q) for _, iv in self.pieces)

    def cover(self) -> Cover:
        """The painted pieces as a cover, grouped by the stage they appeared at."""
        stages = max((t for t, _ in self.pieces), default=-1) + 1
        groups: List[List[Interval]] = [[] for _ in range(stages)]
        for t, iv in self.pieces:
            groups[t].append(iv)
        return Cover(
            [tuple(g) for g in groups],
            length_budget=self.total_consumed,
            name="painted",
            grouped=True,
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "doubling": self.doubling,
            "painted_measure": format_q(self.painted_measure),
            "pieces": [dict(iv.to_dict(), stage=t) for t, iv in self.pieces],
            "consumed": [format_q(c) for c in self.consumed],
        }


class _PaintedZone:
    """Disjoint sorted closed segments, merged as they touch."""

    def __init__(self):
        self.lefts: List[Fraction] = []
        self.rights: List[Fraction] = []

    def end_of_run(self, x: Fraction) -> Fraction:
        # right end of the painted segment holding x, or x itself
        k = bisect.bisect_right(self.lefts, x) - 1
        if k >= 0 and x < self.rights[k]:
            return self.rights[k]
        return x

    def next_left(self, x: Fraction):
        k = bisect.bisect_right(self.lefts, x)
        return self.lefts[k] if k < len(self.lefts) else None

    def add(self, left: Fraction, right: Fraction) -> None:
        k = bisect.bisect_left(self.lefts, left)
        self.lefts.insert(k, left)
        self.rights.insert(k, right)
        merged_l: List[Fraction] = []
        merged_r: List[Fraction] = []
        for l, r in zip(self.lefts, self.rights):
            if merged_r and l <= merged_r[-1]:
                merged_r[-1] = max(merged_r[-1], r)
            else:
                merged_l.append(l)
                merged_r.append(r)
        self.lefts, self.rights = merged_l, merged_r


def painter(a: LscReal, h: PaintSource, fuel: FuelLike, doubling: bool = True) -> PaintResult:
    """
    Run the painters for ``fuel`` stages.

    At stage t painter t joins at a_t and every painter i <= t paints the paint
    that became available since the previous stage.

    Args:
        a (LscReal): The starting points a_0, a_1, ...
        h: Paint per painter: a sequence of rationals, a sequence of reals
            (read with the stage as fuel) or a function ``h(i, t)``.
        fuel: Number of stages.
        doubling (bool): Give every painter twice its paint.

    Raises:
        ValueError: If a painter's available paint ever decreases or is negative.

    Example:
        >>> from fractions import Fraction as F
        >>> starts = LscReal.from_terms("sequence", [0, F(1, 4)])
        >>> res = painter(starts, [F(1, 2), F(1, 2)], 2, doubling=False)
        >>> res.painted_measure
        Fraction(1, 1)
    """
    read = _paint_reader(h)
    factor = 2 if doubling else 1
    steps = steps_of(fuel)
    result = PaintResult(doubling=doubling)
    zone = _PaintedZone()
    cursors: List[Fraction] = []
    for t in range(steps):
        cursors.append(a.approx(t))
        result.consumed.append(Fraction(0))
        for i in range(t + 1):
            available = factor * read(i, t)
            fresh = available - result.consumed[i]
            if fresh < 0:
                raise ValueError(
                    f"Painter {i} at stage {t}: paint fell from {format_q(result.consumed[i])} to {format_q(available)}"
                )
            if fresh == 0:
                continue
            result.consumed[i] = available
            x = cursors[i]
            while fresh > 0:
                x = zone.end_of_run(x)
                nxt = zone.next_left(x)
                take = fresh if nxt is None else min(fresh, nxt - x)
                if take > 0:
                    piece = Interval(x, x + take, CLOSED)
                    zone.add(piece.left, piece.right)
                    result.pieces.append((t, piece))
                    fresh -= take
                    x += take
            cursors[i] = x
            result.log(f"stage {t}: painter {i} painted up to {format_q(x)}")
    logger.debug("painter: %d stages, painted measure %s", steps, format_q(result.painted_measure))
    return result
