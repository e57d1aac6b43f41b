"""
Rational intervals, enumerable covers and the constructions that move them around.

A :class:`Cover` is a step-indexed enumeration of intervals together with a
declared bound on its total length. Unions are measured with an endpoint sweep
that tracks open and closed ends exactly, so a single uncovered point (two
abutting open intervals) is never glossed over.
"""
from __future__ import annotations
import bisect
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import count
from typing import Any, Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

from .SRExceptions import (
    DensityViolated,
    InvariantBroken,
    LengthBudgetExceeded,
    RedundancyLoopGuard,
    SemirealError,
)
from .SRReal import (
    FuelLike,
    LscReal,
    QLike,
    Verdict,
    format_q,
    nth_rational,
    pow2,
    steps_of,
    to_q,
)

logger = logging.getLogger(__name__)

OPEN = "open"
CLOSED = "closed"


@dataclass(frozen=True)
class Interval:
    """
    A rational interval ``(left, right)`` or ``[left, right]``.

    Example:
        >>> iv = Interval("1/4", "1/2")
        >>> iv.length
        Fraction(1, 4)
        >>> iv.contains_point(Fraction(1, 4))
        False
    """

    left: Fraction
    right: Fraction
    openness: str = OPEN

    def __post_init__(self):
        object.__setattr__(self, "left", to_q(self.left))
        object.__setattr__(self, "right", to_q(self.right))
        if self.openness not in (OPEN, CLOSED):
            raise ValueError(f"Openness must be 'open' or 'closed', got '{self.openness}'")
        if self.left > self.right:
            raise ValueError(f"Interval endpoints out of order: {self.left} > {self.right}")

    @property
    def length(self) -> Fraction:
        return self.right - self.left

    @property
    def closed(self) -> bool:
        return self.openness == CLOSED

    @property
    def is_empty(self) -> bool:
        return not self.closed and self.left == self.right

    def contains_point(self, q: QLike) -> bool:
        q = to_q(q)
        if self.closed:
            return self.left <= q <= self.right
        return self.left < q < self.right

    def contains_interval(self, other: "Interval") -> bool:
        """True if ``other`` lies inside this single interval."""
        if other.is_empty:
            return True
        left_ok = self.left < other.left or (
            self.left == other.left and (self.closed or not other.closed)
        )
        right_ok = self.right > other.right or (
            self.right == other.right and (self.closed or not other.closed)
        )
        return left_ok and right_ok

    def lies_left_of(self, q: Fraction) -> bool:
        """True if every point of the interval is below ``q``."""
        return self.right < q or (self.right == q and not self.closed)

    def enlarged(self, radius: QLike) -> "Interval":
        radius = to_q(radius)
        return Interval(self.left - radius, self.right + radius, OPEN)

    def shifted_to(self, left: QLike, openness: Optional[str] = None) -> "Interval":
        left = to_q(left)
        return Interval(left, left + self.length, openness or self.openness)

    def to_dict(self) -> Dict[str, str]:
        return {"left": format_q(self.left), "right": format_q(self.right), "openness": self.openness}

    @classmethod
    def from_dict(cls, data: Dict[str, str]) -> "Interval":
        return cls(to_q(data["left"]), to_q(data["right"]), data.get("openness", OPEN))

    def __str__(self) -> str:
        lb, rb = ("[", "]") if self.closed else ("(", ")")
        return f"{lb}{format_q(self.left)}, {format_q(self.right)}{rb}"


@dataclass
class _Component:
    left: Fraction
    left_closed: bool
    right: Fraction
    right_closed: bool

    def as_interval(self) -> Interval:
        # mixed ends are reported as closed; only measure and membership matter here
        closed = self.left_closed and self.right_closed
        return Interval(self.left, self.right, CLOSED if closed else OPEN)


def merge_intervals(intervals: Iterable[Interval]) -> List[_Component]:
    """Sweep the endpoints and return the connected components of the union."""
    items = sorted(
        (iv for iv in intervals if not iv.is_empty),
        key=lambda iv: (iv.left, not iv.closed),
    )
    comps: List[_Component] = []
    for iv in items:
        if comps:
            cur = comps[-1]
            touches = iv.left < cur.right or (
                iv.left == cur.right and (cur.right_closed or iv.closed)
            )
            if touches:
                if iv.right > cur.right:
                    cur.right, cur.right_closed = iv.right, iv.closed
                elif iv.right == cur.right:
                    cur.right_closed = cur.right_closed or iv.closed
                continue
        comps.append(_Component(iv.left, iv.closed, iv.right, iv.closed))
    return comps


def union_measure(intervals: Iterable[Interval]) -> Fraction:
    """Lebesgue measure of a finite union of intervals."""
    return sum((c.right - c.left for c in merge_intervals(intervals)), Fraction(0))


def covered(target: Interval, intervals: Iterable[Interval]) -> bool:
    """True if ``target`` lies inside the union of ``intervals``."""
    if target.is_empty:
        return True
    t_closed = target.closed
    for c in merge_intervals(intervals):
        left_ok = c.left < target.left or (c.left == target.left and (c.left_closed or not t_closed))
        right_ok = c.right > target.right or (
            c.right == target.right and (c.right_closed or not t_closed)
        )
        if left_ok and right_ok:
            return True
    return False


def contiguous_extent(point: QLike, intervals: Iterable[Interval]) -> Optional[Fraction]:
    """
    Largest delta with ``[point, point + delta)`` covered, or None if ``point``
    itself is not covered.
    """
    p = to_q(point)
    for c in merge_intervals(intervals):
        inside_left = c.left < p or (c.left == p and c.left_closed)
        inside_right = p < c.right or (p == c.right and c.right_closed)
        if inside_left and inside_right:
            return c.right - p
    return None


def covered_measure_between(x: Fraction, y: Optional[Fraction], intervals: Iterable[Interval]) -> Fraction:
    """Measure of the union intersected with ``(x, y)``; ``y=None`` means no right end."""
    total = Fraction(0)
    for c in merge_intervals(intervals):
        lo = max(c.left, x)
        hi = c.right if y is None else min(c.right, y)
        if hi > lo:
            total += hi - lo
    return total


def term_interval(d: LscReal, i: int) -> Interval:
    """Closed segment ``[d_0+...+d_{i-1}, d_0+...+d_i]`` of a series, starting at 0."""
    left = d.approx(i - 1) if i > 0 else Fraction(0)
    if i == 0 and d.term(0) < 0:
        raise SemirealError("Term intervals need a non-negative starting term")
    return Interval(left, d.approx(i), CLOSED)


def covered_terms(d: LscReal, intervals: Sequence[Interval], n_terms: int) -> List[int]:
    """Indices i < n_terms whose closed term interval lies inside a single interval."""
    out = []
    for i in range(n_terms):
        seg = term_interval(d, i)
        if any(iv.contains_interval(seg) for iv in intervals):
            out.append(i)
    return out


class Cover:
    """
    A step-indexed enumeration of intervals with a declared length budget.

    Each enumeration step reveals a (possibly empty) group of intervals; a
    finite cover reveals one interval per step and then ends. Fuel counts
    steps, so ``emitted(f)`` is always a prefix of ``emitted(f')`` for f <= f'.

    Args:
        items: Either intervals (one per step) or, for lazy constructions,
            an iterator of interval groups (tuples) produced step by step.
        length_budget (Optional[QLike]): Declared bound on the total length.
        name (str): Label used in logs and files.
        grouped (bool): True when ``items`` yields groups instead of intervals.
    """

    def __init__(
        self,
        items: Iterable[Any],
        length_budget: Optional[QLike] = None,
        name: str = "",
        grouped: bool = False,
    ):
        self._source: Iterator[Any] = iter(items)
        self._grouped = grouped
        self._steps: List[Tuple[Interval, ...]] = []
        self._ended = False
        self._failed: Optional[SemirealError] = None
        self.length_budget = to_q(length_budget) if length_budget is not None else None
        self.name = name

    @classmethod
    def from_intervals(
        cls, intervals: Sequence[Interval], length_budget: Optional[QLike] = None, name: str = ""
    ) -> "Cover":
        return cls(list(intervals), length_budget=length_budget, name=name)

    def _fill(self, n: int) -> None:
        while len(self._steps) < n and not self._ended:
            if self._failed is not None:
                raise self._failed
            try:
                item = next(self._source)
            except StopIteration:
                self._ended = True
                break
            except SemirealError as exc:
                self._failed = exc
                raise
            if self._grouped:
                self._steps.append(tuple(item))
            else:
                self._steps.append((item,))

    def step_items(self, t: int) -> Optional[Tuple[Interval, ...]]:
        """Intervals revealed at step t, or None once a finite cover has ended."""
        self._fill(t + 1)
        if t < len(self._steps):
            return self._steps[t]
        return None

    def ended_within(self, fuel: FuelLike) -> bool:
        """True if the enumeration is known to stop within ``fuel`` steps."""
        steps = steps_of(fuel)
        self._fill(steps + 1)
        return self._ended and len(self._steps) <= steps

    def emitted(self, fuel: FuelLike) -> List[Interval]:
        """All intervals revealed in the first ``fuel`` steps."""
        steps = steps_of(fuel)
        self._fill(steps)
        return [iv for group in self._steps[:steps] for iv in group]

    def total_length(self, fuel: FuelLike) -> Fraction:
        return total_length(self, fuel)

    def union_measure(self, fuel: FuelLike) -> Fraction:
        return union_measure(self.emitted(fuel))

    def to_dict(self, fuel: FuelLike) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "name": self.name,
            "intervals": [iv.to_dict() for iv in self.emitted(fuel)],
        }
        if self.length_budget is not None:
            data["length_budget"] = format_q(self.length_budget)
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Cover":
        return cls.from_intervals(
            [Interval.from_dict(d) for d in data.get("intervals", [])],
            length_budget=data.get("length_budget"),
            name=data.get("name", ""),
        )

    def __repr__(self) -> str:
        return f"Cover({self.name or '<anonymous>'}, budget={self.length_budget})"


def total_length(c: Cover, fuel: FuelLike) -> Fraction:
    """
    Sum of the lengths of the intervals emitted within ``fuel`` (not the union measure).

    Raises:
        LengthBudgetExceeded: As soon as the running sum passes the budget.
    """
    running = Fraction(0)
    for k, iv in enumerate(c.emitted(fuel)):
        running += iv.length
        if c.length_budget is not None and running > c.length_budget:
            raise LengthBudgetExceeded(
                f"Cover {c.name or '<anonymous>'}: item {k} brings the total length to "
                f"{format_q(running)} > budget {format_q(c.length_budget)}"
            )
    return running


def contains(c: Cover, a: LscReal, fuel: FuelLike) -> Verdict:
    """
    Semi-decide whether the limit of ``a`` lies in the union of ``c``.

    Confirmed once ``[a_i, known_sup]`` is inside the union of the intervals
    emitted within ``fuel``, where a_i is the latest approximation; the limit
    lies in that segment, so the answer is sound. Without ``known_sup`` the
    answer stays Pending.
    """
    steps = steps_of(fuel)
    if steps == 0 or a.known_sup is None:
        return Verdict.pending()
    lower = a.approx(steps - 1)
    if lower > a.known_sup:
        raise InvariantBroken(f"Approximation {format_q(lower)} exceeds known_sup {format_q(a.known_sup)}")
    if covered(Interval(lower, a.known_sup, CLOSED), c.emitted(steps)):
        return Verdict.confirmed(True)
    return Verdict.pending()


def transform_cover(
    cover_beta: Cover,
    w: Any,
    a: LscReal,
    b: LscReal,
    name: str = "",
) -> Cover:
    """
    Turn a cover aimed at the limit of ``b`` into one aimed at the limit of ``a``.

    At step t the next group of ``cover_beta`` joins a waiting list kept sorted
    by left endpoint and b_t is read. Waiting intervals entirely left of b_t are
    dropped. Every b_t that falls inside a waiting interval becomes one of its
    anchors, and phi is queried at each anchor with fuel t+1, so an anchor
    first seen at an earlier step gets more fuel at every later step. The
    first confirmed phi(anchor) re-emits the interval as the closed interval
    of the same length starting at max(phi(anchor), a_t). Intervals with no
    confirmed anchor stay postponed.

    Args:
        cover_beta: The source cover.
        w: A ReductionWitness for alpha <=_1 beta.
        a: Approximations of alpha.
        b: Approximations of beta.

    Returns:
        Cover: Lazily enumerated, same length budget as the source.
    """
    logs: List[str] = []

    def generate() -> Iterator[Tuple[Interval, ...]]:
        # (interval, anchors) sorted by interval
        waiting: List[Tuple[Interval, List[Fraction]]] = []
        source_done = False
        for t in count():
            if not source_done:
                group = cover_beta.step_items(t)
                if group is None:
                    source_done = True
                else:
                    for iv in group:
                        keys = [(w_.left, w_.right) for w_, _ in waiting]
                        waiting.insert(bisect.bisect_right(keys, (iv.left, iv.right)), (iv, []))
            if source_done and not waiting:
                return
            bt = b.approx(t)
            out: List[Interval] = []
            keep: List[Tuple[Interval, List[Fraction]]] = []
            for iv, anchors in waiting:
                if iv.lies_left_of(bt):
                    logs.append(f"step {t}: dropped {iv}, left of b={format_q(bt)}")
                    continue
                if iv.contains_point(bt) and (not anchors or anchors[-1] != bt):
                    anchors.append(bt)
                moved = None
                for s in anchors:
                    verdict = w.query(s, t + 1)
                    if verdict.is_confirmed:
                        moved = iv.shifted_to(max(verdict.payload, a.approx(t)), CLOSED)
                        logs.append(f"step {t}: {iv} -> {moved} (phi at b={format_q(s)})")
                        break
                if moved is not None:
                    out.append(moved)
                else:
                    keep.append((iv, anchors))
            waiting = keep
            yield tuple(out)

    result = Cover(generate(), length_budget=cover_beta.length_budget, name=name or f"T({cover_beta.name})", grouped=True)
    result.logs = logs  # type: ignore[attr-defined]
    return result


@dataclass
class UnionBoundResult:
    """
    Outcome of :func:`union_bound`.

    Attributes:
        bound: The certified bound 4/c on the union measure.
        union_measure: The exact measure of the union.
        kept: Non-redundant intervals sorted by left endpoint.
        removed: Intervals found inside the union of the others.
        even, odd: The two classes of pairwise disjoint intervals.
        logs: Elimination and verification log.
    """

    bound: Fraction
    union_measure: Fraction
    kept: List[Interval]
    removed: List[Interval]
    even: List[Interval]
    odd: List[Interval]
    logs: List[str] = field(default_factory=list)

    def log(self, message: str):
        self.logs.append(message)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "bound": format_q(self.bound),
            "union_measure": format_q(self.union_measure),
            "kept": [iv.to_dict() for iv in self.kept],
            "removed": [iv.to_dict() for iv in self.removed],
            "even_odd_partition": {
                "even": [iv.to_dict() for iv in self.even],
                "odd": [iv.to_dict() for iv in self.odd],
            },
        }


def _weight_inside(iv: Interval, weight: Mapping[Fraction, Fraction]) -> Fraction:
    return sum((w for q, w in weight.items() if iv.contains_point(q)), Fraction(0))


def union_bound(
    intervals: Sequence[Interval],
    weight: Mapping[QLike, QLike],
    c: QLike,
) -> UnionBoundResult:
    """
    Certify that a finite union of dense intervals has measure at most 4/c.

    Every interval must carry weight of at least (c/2)*length (equality is
    accepted, the bound still holds). Intervals inside the union of the others
    are removed, the rest are sorted by left endpoint and checked to satisfy
    r_i <= l_{i+2}, so the even-numbered and the odd-numbered intervals are each
    pairwise disjoint and each class has measure at most 2/c.

    Raises:
        DensityViolated: For the first interval without enough weight.
        RedundancyLoopGuard: If elimination does not settle.
        InvariantBroken: If the sorted non-redundant list fails the interleaving check.
    """
    c = to_q(c)
    if c <= 0:
        raise SemirealError(f"Density constant must be positive, got {format_q(c)}")
    w = {to_q(q): to_q(v) for q, v in weight.items()}
    if any(v < 0 for v in w.values()):
        raise SemirealError("Weights must be non-negative")
    total_weight = sum(w.values(), Fraction(0))
    if total_weight > 1:
        raise SemirealError(f"Total weight {format_q(total_weight)} exceeds 1")

    items = [iv for iv in intervals if not iv.is_empty]
    for iv in items:
        inside = _weight_inside(iv, w)
        required = c / 2 * iv.length
        if inside < required:
            raise DensityViolated(str(iv), format_q(inside), format_q(required))

    result = UnionBoundResult(Fraction(4) / c, Fraction(0), [], [], [], [])
    kept = sorted(items, key=lambda iv: (iv.left, iv.right, iv.openness))
    guard = len(kept) + 1
    rounds = 0
    changed = True
    while changed:
        rounds += 1
        if rounds > guard:
            raise RedundancyLoopGuard(f"Redundancy elimination did not settle after {guard} rounds")
        changed = False
        for k, iv in enumerate(kept):
            others = kept[:k] + kept[k + 1:]
            if covered(iv, others):
                result.removed.append(iv)
                result.log(f"removed redundant {iv}")
                del kept[k]
                changed = True
                break

    for k in range(len(kept) - 1):
        if kept[k + 1].right < kept[k].right:
            raise InvariantBroken(f"Right endpoints not sorted at position {k}")
    for k in range(len(kept) - 2):
        if kept[k].right > kept[k + 2].left:
            raise InvariantBroken(f"Interval {k} overlaps interval {k + 2}")

    result.kept = kept
    result.even = kept[0::2]
    result.odd = kept[1::2]
    result.union_measure = union_measure(kept)
    result.log(
        f"{len(kept)} intervals kept, union measure {format_q(result.union_measure)}, "
        f"bound {format_q(result.bound)}"
    )
    logger.debug("union_bound: %s", result.logs[-1])
    return result


def u_c_cover(M: Any, c: int, fuel: Optional[FuelLike] = None) -> Cover:
    """
    Neighbourhoods of radius 2^-(k+c) around every rational with a known
    complexity bound k.

    Entries of the machine are revealed in (time, program) order; rationals
    are numbered by :func:`nth_rational` of the output. An interval is emitted
    the first time a rational gets a bound and again whenever the bound
    improves; earlier intervals are kept. By the Kraft inequality the total
    length stays within 2^-(c-1).
    """
    if c < 0:
        raise ValueError(f"c must be non-negative, got {c}")
    best: Dict[int, int] = {}
    out: List[Interval] = []
    for entry in M.enumeration(fuel):
        k = len(entry.program)
        if entry.output in best and best[entry.output] <= k:
            continue
        best[entry.output] = k
        r = nth_rational(entry.output)
        radius = pow2(k + c)
        out.append(Interval(r - radius, r + radius, OPEN))
    return Cover.from_intervals(out, length_budget=pow2(c - 1), name=f"U_{c}({M.name})")
