"""
Lower semicomputable reals presented by exact rational streams.

A lower semicomputable real is the limit of a computable increasing sequence of
rationals. This module provides the three equivalent presentations of such a
real (an increasing sequence of approximations, a series of non-negative terms
after a possibly negative starting point, and an enumeration of its left cut),
the conversions between them, and the budget ("fuel") plumbing that turns
semi-decidable questions into deterministic finite computations.

All arithmetic is exact: rationals are ``fractions.Fraction`` everywhere and
floats are rejected on input.
"""
from __future__ import annotations
import logging
import math
import numbers
from dataclasses import dataclass
from fractions import Fraction
from itertools import count
from typing import Any, Callable, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

from .SRExceptions import NegativeTermError, NonIncreasingError, SemirealError

logger = logging.getLogger(__name__)

Q = Fraction
QLike = Union[Fraction, int, str]

SEQUENCE = "sequence"
SERIES = "series"
LEFTCUT = "leftcut"
KINDS = (SEQUENCE, SERIES, LEFTCUT)

# Number of consecutive empty stages a lazy construction tolerates before it
# reports PendingError instead of looping forever.
DEFAULT_STALL_LIMIT = 10_000


def to_q(value: Any) -> Fraction:
    """
    Convert ``value`` to an exact rational.

    Args:
        value: A Fraction, an integer (Python or numpy), or a string such as ``"3/8"``.

    Returns:
        Fraction: The exact value.

    Raises:
        TypeError: If ``value`` is a float or another inexact type.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("Booleans are not rationals")
    if isinstance(value, str):
        return parse_q(value)
    if isinstance(value, numbers.Rational):
        return Fraction(value)
    raise TypeError(f"Expected an exact rational, got {type(value).__name__}: {value!r}")


def parse_q(text: str) -> Fraction:
    """
    Parse ``"num/den"`` (or a plain integer) into a Fraction.

    Example:
        >>> parse_q("6/8")
        Fraction(3, 4)
    """
    text = text.strip()
    if not text:
        raise ValueError("Empty rational literal")
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"Invalid rational literal '{text}'") from exc


def format_q(q: Fraction) -> str:
    """Render ``q`` as ``"num/den"``; the denominator is always written."""
    q = to_q(q)
    return f"{q.numerator}/{q.denominator}"


def pow2(k: int) -> Fraction:
    """Return 2^-k as an exact rational (k may be negative)."""
    if k >= 0:
        return Fraction(1, 1 << k)
    return Fraction(1 << (-k))


@dataclass(frozen=True)
class Fuel:
    """
    A non-negative enumeration budget.

    One unit of fuel is one term query of one underlying stream. Every budgeted
    operation is a deterministic function of its input and its fuel, and more
    fuel never retracts anything emitted with less.
    """

    steps: int

    def __post_init__(self):
        if self.steps < 0:
            raise ValueError(f"Fuel must be non-negative, got {self.steps}")

    def __int__(self) -> int:
        return self.steps


FuelLike = Union[Fuel, int]


def steps_of(fuel: FuelLike) -> int:
    """Return the step count of ``fuel``, validating it."""
    if isinstance(fuel, Fuel):
        return fuel.steps
    if fuel < 0:
        raise ValueError(f"Fuel must be non-negative, got {fuel}")
    return int(fuel)


@dataclass(frozen=True)
class Verdict:
    """
    Outcome of a semi-decidable query.

    A query that is Pending at some fuel may become Confirmed with more fuel;
    a Confirmed payload never changes afterwards.
    """

    status: str
    payload: Any = None

    CONFIRMED = "confirmed"
    PENDING = "pending"

    @classmethod
    def confirmed(cls, payload: Any = True) -> "Verdict":
        return cls(cls.CONFIRMED, payload)

    @classmethod
    def pending(cls) -> "Verdict":
        return cls(cls.PENDING, None)

    @property
    def is_confirmed(self) -> bool:
        return self.status == self.CONFIRMED

    @property
    def is_pending(self) -> bool:
        return self.status == self.PENDING

    def to_dict(self) -> Dict[str, Any]:
        payload = self.payload
        if isinstance(payload, Fraction):
            payload = format_q(payload)
        return {"status": self.status, "payload": payload}


class LscReal:
    """
    A lower semicomputable real given by a lazily evaluated rational stream.

    The meaning of the raw terms depends on ``kind``:

    * ``sequence``: term i is the approximation a_i; terms never decrease.
    * ``series``: term i is d_i; d_0 may be negative, d_i >= 0 for i > 0.
    * ``leftcut``: term i is the i-th enumerated rational below the limit.

    Whatever the kind, :meth:`approx` returns the non-decreasing stage value
    after raw term n, and :meth:`approximations` returns the strictly
    increasing presentation obtained by skipping repeated values. Terms are
    cached, so term(i) is stable across queries. A finite source is padded:
    sequences and left cuts repeat their last value, series continue with zeros.

    Args:
        kind (str): One of ``"sequence"``, ``"series"``, ``"leftcut"``.
        terms: An iterable of rationals or a callable ``i -> rational``.
        known_sup (Optional[QLike]): An upper bound on the limit, used for
            sanity checks and for certifying membership in covers.
        limit (Optional[QLike]): The exact limit when it is known (computable
            test reals). Defaults ``known_sup`` when that is not given.
        name (str): Label used in logs and serialized output.
        stall_limit (int): Guard used by lazy constructions.

    Example:
        >>> half = LscReal.from_terms("series", ["0", "1/2", "1/4"])
        >>> half.approximations(3)
        [Fraction(0, 1), Fraction(1, 2), Fraction(3, 4)]
        >>> half.limit
        Fraction(3, 4)
    """

    def __init__(
        self,
        kind: str,
        terms: Union[Iterable[QLike], Callable[[int], QLike]],
        known_sup: Optional[QLike] = None,
        limit: Optional[QLike] = None,
        name: str = "",
        stall_limit: int = DEFAULT_STALL_LIMIT,
    ):
        if kind not in KINDS:
            raise ValueError(f"Unknown kind '{kind}', expected one of {KINDS}")
        self.kind = kind
        if callable(terms):
            self._source: Iterator[QLike] = (terms(i) for i in count())
        else:
            self._source = iter(terms)
        self._raw: List[Fraction] = []
        self._approx: List[Fraction] = []
        self._given: Optional[int] = None
        self._stalled: Optional[SemirealError] = None
        self.limit = to_q(limit) if limit is not None else None
        if known_sup is not None:
            self.known_sup: Optional[Fraction] = to_q(known_sup)
        else:
            self.known_sup = self.limit
        self.name = name
        self.stall_limit = stall_limit

    # --- constructors ---
    @classmethod
    def from_terms(
        cls,
        kind: str,
        values: Sequence[QLike],
        known_sup: Optional[QLike] = None,
        limit: Optional[QLike] = None,
        name: str = "",
    ) -> "LscReal":
        """
        Build a finite literal presentation; its limit is computed exactly.

        Raises:
            ValueError: If ``values`` is empty.
        """
        terms = [to_q(v) for v in values]
        if not terms:
            raise ValueError("A literal presentation needs at least one term")
        if limit is None:
            if kind == SERIES:
                limit = sum(terms, Fraction(0))
            elif kind == SEQUENCE:
                limit = terms[-1]
            else:
                limit = max(terms)
        return cls(kind, terms, known_sup=known_sup, limit=limit, name=name)

    @classmethod
    def constant(cls, value: QLike, name: str = "") -> "LscReal":
        """The computable real ``value`` as a one-term sequence."""
        return cls.from_terms(SEQUENCE, [value], name=name or f"const({format_q(to_q(value))})")

    @classmethod
    def geometric(cls, limit: QLike, gap: QLike, ratio: QLike, name: str = "") -> "LscReal":
        """
        The sequence a_n = limit - gap * ratio^n.

        Raises:
            ValueError: Unless gap > 0 and 0 < ratio < 1.
        """
        limit, gap, ratio = to_q(limit), to_q(gap), to_q(ratio)
        if gap <= 0:
            raise ValueError(f"Gap must be positive, got {gap}")
        if not 0 < ratio < 1:
            raise ValueError(f"Ratio must lie in (0, 1), got {ratio}")
        label = name or f"geometric({format_q(limit)},{format_q(gap)},{format_q(ratio)})"
        return cls(SEQUENCE, lambda n: limit - gap * ratio ** n, limit=limit, name=label)

    # --- stream access ---
    def _fill(self, n: int) -> None:
        if n < 0:
            raise IndexError(f"Negative term index {n}")
        while len(self._raw) <= n:
            if self._given is not None:
                pad = Fraction(0) if self.kind == SERIES else self._raw[-1]
                self._raw.append(pad)
                continue
            if self._stalled is not None:
                raise self._stalled
            try:
                value = next(self._source)
            except StopIteration:
                if not self._raw:
                    raise SemirealError(f"Presentation {self.name or '<anonymous>'} has no terms")
                self._given = len(self._raw)
                logger.debug("%s: source ended after %d terms, padding", self.name, self._given)
                continue
            except SemirealError as exc:
                self._stalled = exc
                raise
            try:
                self._append(to_q(value))
            except SemirealError as exc:
                self._stalled = exc
                raise

    def _append(self, value: Fraction) -> None:
        i = len(self._raw)
        if self.kind == SEQUENCE and i > 0 and value < self._raw[-1]:
            raise NonIncreasingError(
                i, f"Sequence {self.name or '<anonymous>'} decreases at index {i}: "
                f"{format_q(self._raw[-1])} -> {format_q(value)}"
            )
        if self.kind == SERIES and i > 0 and value < 0:
            raise NegativeTermError(i, format_q(value))
        self._raw.append(value)

    def term(self, i: int) -> Fraction:
        """Return raw term i (approximation, increment or enumerated rational)."""
        self._fill(i)
        return self._raw[i]

    def prefix(self, n: int) -> List[Fraction]:
        """Return the first ``n`` raw terms."""
        if n <= 0:
            return []
        self._fill(n - 1)
        return list(self._raw[:n])

    def is_tail(self, i: int) -> bool:
        """True if index i lies in the padding after a finite source ran out."""
        self._fill(i)
        return self._given is not None and i >= self._given

    def approx(self, n: int) -> Fraction:
        """Return the non-decreasing stage value after raw term n."""
        while len(self._approx) <= n:
            j = len(self._approx)
            t = self.term(j)
            if j == 0:
                self._approx.append(t)
            elif self.kind == SERIES:
                self._approx.append(self._approx[-1] + t)
            elif self.kind == LEFTCUT:
                self._approx.append(max(self._approx[-1], t))
            else:
                self._approx.append(t)
        return self._approx[n]

    def stages(self, fuel: FuelLike) -> List[Tuple[int, Fraction]]:
        """
        Return ``(index, value)`` for every strict increase among the first
        ``fuel`` stage values; this is the index remapping of the strictly
        increasing presentation.
        """
        out: List[Tuple[int, Fraction]] = []
        for i in range(steps_of(fuel)):
            value = self.approx(i)
            if not out or value > out[-1][1]:
                out.append((i, value))
        return out

    def approximations(self, fuel: FuelLike) -> List[Fraction]:
        """Strictly increasing approximations revealed by ``fuel`` term queries."""
        return [value for _, value in self.stages(fuel)]

    def latest(self, fuel: FuelLike) -> Optional[Fraction]:
        """Best lower bound known after ``fuel`` queries, or None for zero fuel."""
        steps = steps_of(fuel)
        return self.approx(steps - 1) if steps > 0 else None

    # --- arithmetic sugar ---
    def __add__(self, other: "LscReal") -> "LscReal":
        if not isinstance(other, LscReal):
            return NotImplemented
        return lsc_sum(self, other)

    def scaled(self, c: QLike) -> "LscReal":
        return scale(self, c)

    # --- serialization ---
    def to_dict(self, fuel: FuelLike) -> Dict[str, Any]:
        """Serialize the first ``fuel`` raw terms."""
        data: Dict[str, Any] = {
            "kind": self.kind,
            "name": self.name,
            "terms": [format_q(t) for t in self.prefix(steps_of(fuel))],
        }
        if self.limit is not None:
            data["limit"] = format_q(self.limit)
        if self.known_sup is not None:
            data["known_sup"] = format_q(self.known_sup)
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "LscReal":
        if "kind" not in data or "terms" not in data:
            raise ValueError("Real representation needs 'kind' and 'terms'")
        return cls.from_terms(
            data["kind"],
            data["terms"],
            known_sup=data.get("known_sup"),
            limit=data.get("limit"),
            name=data.get("name", ""),
        )

    def __repr__(self) -> str:
        label = self.name or "<anonymous>"
        return f"LscReal({self.kind}, {label}, limit={self.limit})"


def seq_from_series(s: LscReal) -> LscReal:
    """
    Turn a series presentation into its sequence of partial sums.

    Zero increments leave repeated values in the raw stream; the strictly
    increasing presentation and its index remapping come from
    :meth:`LscReal.stages`.

    Raises:
        ValueError: If ``s`` is not a series.
        NegativeTermError: When a negative term after index 0 is reached.

    Example:
        >>> d = LscReal.from_terms("series", ["-1", "1", "0"])
        >>> seq_from_series(d).approximations(5)
        [Fraction(-1, 1), Fraction(0, 1)]
    """
    if s.kind != SERIES:
        raise ValueError(f"seq_from_series expects a series, got {s.kind}")
    return LscReal(SEQUENCE, s.approx, known_sup=s.known_sup, limit=s.limit, name=s.name)


def series_from_seq(a: LscReal, strict: bool = True) -> LscReal:
    """
    Turn an increasing sequence into the series d_0 = a_0, d_i = a_i - a_{i-1}.

    Args:
        a: A sequence (or left cut) presentation.
        strict: Reject zero increments, except in the padding of a finite literal.

    Raises:
        NonIncreasingError: At the first index where a_i <= a_{i-1} (strict) or
            a_i < a_{i-1}.
    """
    if a.kind == SERIES:
        raise ValueError("series_from_seq expects a sequence presentation")

    def increments() -> Iterator[Fraction]:
        prev: Optional[Fraction] = None
        for i in count():
            value = a.approx(i)
            if prev is None:
                yield value
            else:
                d = value - prev
                if d < 0 or (strict and d == 0):
                    if d == 0 and a.is_tail(i):
                        return
                    raise NonIncreasingError(i)
                yield d
            prev = value

    return LscReal(SERIES, increments(), known_sup=a.known_sup, limit=a.limit, name=a.name)


def cantor_pair(i: int, j: int) -> int:
    """Cantor pairing <i, j> = (i+j)(i+j+1)/2 + j."""
    if i < 0 or j < 0:
        raise ValueError(f"Cannot pair negative indices ({i}, {j})")
    s = i + j
    return s * (s + 1) // 2 + j


def cantor_unpair(n: int) -> Tuple[int, int]:
    """Inverse of :func:`cantor_pair`."""
    if n < 0:
        raise ValueError(f"Cannot unpair negative index {n}")
    w = (math.isqrt(8 * n + 1) - 1) // 2
    j = n - w * (w + 1) // 2
    return w - j, j


def fusc(n: int) -> int:
    """Stern's diatomic sequence."""
    a, b = 1, 0
    while n:
        if n & 1:
            b += a
        else:
            a += b
        n >>= 1
    return b


def nth_rational(n: int) -> Fraction:
    """
    The n-th non-negative rational in the Calkin-Wilf order, with 0 first.

    Example:
        >>> [nth_rational(n) for n in range(5)]
        [Fraction(0, 1), Fraction(1, 1), Fraction(1, 2), Fraction(2, 1), Fraction(1, 3)]
    """
    if n < 0:
        raise ValueError(f"Index must be non-negative, got {n}")
    if n == 0:
        return Fraction(0)
    return Fraction(fusc(n), fusc(n + 1))


def leftcut(a: LscReal, fuel: FuelLike) -> frozenset:
    """
    Rationals proven to lie below the limit of ``a``.

    The pairs (i, k) are visited in Cantor order and a_i - 2^-k is emitted for
    each of the first ``fuel`` pairs, so the set only grows with fuel.
    """
    out = set()
    for p in range(steps_of(fuel)):
        i, k = cantor_unpair(p)
        out.add(a.approx(i) - pow2(k))
    return frozenset(out)


def monotone_hull(
    x: Union[Iterable[QLike], Callable[[int], QLike]],
    known_sup: Optional[QLike] = None,
    limit: Optional[QLike] = None,
    name: str = "hull",
) -> LscReal:
    """
    Replace the n-th value by the maximum of the first n values.

    Example:
        >>> monotone_hull(["0", "1/2", "1/4", "3/4"]).approximations(4)
        [Fraction(0, 1), Fraction(1, 2), Fraction(3, 4)]
    """
    source: Iterable[QLike] = (x(i) for i in count()) if callable(x) else x

    def running_max() -> Iterator[Fraction]:
        best: Optional[Fraction] = None
        for value in source:
            value = to_q(value)
            if best is None or value > best:
                best = value
            yield best

    return LscReal(SEQUENCE, running_max(), known_sup=known_sup, limit=limit, name=name)


def _combine_bound(x: Optional[Fraction], y: Optional[Fraction]) -> Optional[Fraction]:
    if x is None or y is None:
        return None
    return x + y


def lsc_sum(a: LscReal, b: LscReal) -> LscReal:
    """
    The termwise sum of the stage values of ``a`` and ``b``.

    Exposed under this name so the builtin ``sum`` stays unshadowed; ``a + b``
    is equivalent.
    """
    return LscReal(
        SEQUENCE,
        lambda i: a.approx(i) + b.approx(i),
        known_sup=_combine_bound(a.known_sup, b.known_sup),
        limit=_combine_bound(a.limit, b.limit),
        name=f"({a.name}+{b.name})",
    )


def scale(a: LscReal, c: QLike) -> LscReal:
    """
    The stage values of ``a`` multiplied by a positive rational ``c``.

    Raises:
        SemirealError: If c <= 0.
    """
    c = to_q(c)
    if c <= 0:
        raise SemirealError(f"Scale factor must be positive, got {format_q(c)}")
    return LscReal(
        SEQUENCE,
        lambda i: c * a.approx(i),
        known_sup=None if a.known_sup is None else c * a.known_sup,
        limit=None if a.limit is None else c * a.limit,
        name=f"{format_q(c)}*{a.name}",
    )


def dovetail(streams: Sequence[LscReal], fuel: FuelLike) -> List[Tuple[int, int, Fraction]]:
    """
    Round-robin schedule over several streams.

    Step t queries stream ``t % k`` at index ``t // k`` and the triple
    ``(stream, index, stage value)`` is recorded. The order is fixed, so the
    Pending/Confirmed boundary of anything built on it is reproducible.
    """
    k = len(streams)
    if k == 0:
        return []
    out = []
    for t in range(steps_of(fuel)):
        s, i = t % k, t // k
        out.append((s, i, streams[s].approx(i)))
    return out
