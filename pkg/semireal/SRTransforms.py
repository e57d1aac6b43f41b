"""
Series surgery.

* :class:`DoubleSeries` and :func:`regroup` sum a double series row by row.
* :func:`allocate_mtilde` and :func:`combine_allocations` build a semimeasure
  on pairs that dominates a double series wherever the row sums are small
  against a given semimeasure.
* :func:`mesh_refine` cuts two series with the same sum at the union of their
  partial sums, so both are groupings of one finer series;
  :func:`split_nonincreasing` splits terms until the series never increases.
* :func:`cover_to_semimeasure` turns the terms of a series covered by a small
  cover into a semimeasure.
"""
from __future__ import annotations
import logging
import math
import re
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

from .SRCover import Cover, covered_terms, total_length
from .SRExceptions import FileFormatError, InvariantBroken, RowNotFinite, SumMismatch
from .SRMachine import Semimeasure, pair_index
from .SRReal import SERIES, FuelLike, LscReal, QLike, format_q, parse_q, pow2, steps_of, to_q

logger = logging.getLogger(__name__)

DEFAULT_MESH_TERMS = 64

_CELL_LINE = re.compile(r"^\s*(\d+)\s+(\d+)\s+(\S+)\s*$")

Cell = Tuple[int, int]


class DoubleSeries:
    """
    A double series a_{ij} of non-negative rationals with finite rows.

    Args:
        cells: Mapping ``(i, j) -> a_ij``; missing cells are zero.
        row_support: Optional declared column sets per row. When given, a
            nonzero cell outside its row's declared support is an error.
        name (str): Label.

    Raises:
        ValueError: On negative cells.
        RowNotFinite: If a nonzero cell contradicts ``row_support``.

    Example:
        >>> d = DoubleSeries({(0, 0): "1/4", (0, 1): "1/4", (1, 0): "1/8"})
        >>> d.row_sum(0)
        Fraction(1, 2)
    """

    def __init__(
        self,
        cells: Mapping[Cell, QLike],
        row_support: Optional[Mapping[int, Iterable[int]]] = None,
        name: str = "double-series",
    ):
        self.name = name
        self.cells: Dict[Cell, Fraction] = {}
        for (i, j), value in cells.items():
            q = to_q(value)
            if q < 0:
                raise ValueError(f"Cell ({i}, {j}) is negative: {format_q(q)}")
            if q != 0:
                self.cells[(int(i), int(j))] = q
        actual: Dict[int, Set[int]] = {}
        for i, j in self.cells:
            actual.setdefault(i, set()).add(j)
        if row_support is not None:
            declared = {int(i): set(cols) for i, cols in row_support.items()}
            for i, cols in actual.items():
                for j in sorted(cols):
                    if j not in declared.get(i, set()):
                        raise RowNotFinite(i, j)
        self.row_support: Dict[int, List[int]] = {i: sorted(cols) for i, cols in actual.items()}

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[QLike]], name: str = "double-series") -> "DoubleSeries":
        return cls({(i, j): v for i, row in enumerate(rows) for j, v in enumerate(row)}, name=name)

    @classmethod
    def from_lines(cls, lines: Iterable[str], name: str = "double-series", source: str = "<lines>") -> "DoubleSeries":
        """Parse ``i j num/den`` lines; ``#`` starts a comment."""
        cells: Dict[Cell, Fraction] = {}
        for lineno, raw in enumerate(lines, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            match = _CELL_LINE.match(line)
            if match is None:
                raise FileFormatError(source, lineno, f"expected 'i j num/den', got '{line}'")
            i, j = int(match.group(1)), int(match.group(2))
            try:
                value = parse_q(match.group(3))
            except ValueError as exc:
                raise FileFormatError(source, lineno, str(exc)) from exc
            if (i, j) in cells:
                warnings.warn(f"{source}:{lineno}: cell ({i}, {j}) given twice, keeping the last value")
            cells[(i, j)] = value
        return cls(cells, name=name)

    def to_lines(self) -> List[str]:
        return [f"{i} {j} {format_q(v)}" for (i, j), v in sorted(self.cells.items())]

    def term(self, i: int, j: int) -> Fraction:
        return self.cells.get((i, j), Fraction(0))

    @property
    def n_rows(self) -> int:
        return max(self.row_support, default=-1) + 1

    @property
    def n_columns(self) -> int:
        return max((j for _, j in self.cells), default=-1) + 1

    def row(self, i: int) -> List[Tuple[int, Fraction]]:
        return [(j, self.cells[(i, j)]) for j in self.row_support.get(i, [])]

    def row_sum(self, i: int) -> Fraction:
        return sum((v for _, v in self.row(i)), Fraction(0))

    def total(self, n_rows: Optional[int] = None) -> Fraction:
        """Sum of all cells in rows below ``n_rows`` (all rows by default)."""
        rows = self.n_rows if n_rows is None else n_rows
        return sum((v for (i, _), v in self.cells.items() if i < rows), Fraction(0))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "cells": [[i, j, format_q(v)] for (i, j), v in sorted(self.cells.items())],
        }

    def __repr__(self) -> str:
        return f"DoubleSeries({self.name}, rows={self.n_rows}, cells={len(self.cells)})"


def regroup(d: DoubleSeries) -> LscReal:
    """The series of row sums A_i = sum_j a_ij."""
    sums = [d.row_sum(i) for i in range(d.n_rows)] or [Fraction(0)]
    return LscReal.from_terms(SERIES, sums, name=f"rows({d.name})")


@dataclass
class Allocation:
    """
    Greedy allocation m~_ij <= c * a_ij under the row caps sum_j m~_ij <= m_i.

    ``increments[t]`` holds what stage t added, so ``value(i, j, t)`` replays
    the allocation as a non-decreasing stream.
    """

    c: Fraction
    mtilde: Dict[Cell, Fraction] = field(default_factory=dict)
    increments: List[Dict[Cell, Fraction]] = field(default_factory=list)
    caps: Dict[int, Fraction] = field(default_factory=dict)
    logs: List[str] = field(default_factory=list)

    def log(self, message: str):
        self.logs.append(message)

    def value(self, i: int, j: int, fuel: Optional[FuelLike] = None) -> Fraction:
        if fuel is None:
            return self.mtilde.get((i, j), Fraction(0))
        upto = steps_of(fuel)
        return sum((inc.get((i, j), Fraction(0)) for inc in self.increments[:upto]), Fraction(0))

    def row_total(self, i: int) -> Fraction:
        return sum((v for (r, _), v in self.mtilde.items() if r == i), Fraction(0))

    def ratio_bound_holds(self, d: DoubleSeries, i: int) -> bool:
        """If c * A_i <= m_i then every a_ij / m~_ij is at most 1/c."""
        if self.c * d.row_sum(i) > self.caps.get(i, Fraction(0)):
            return True
        return all(self.c * a <= self.value(i, j) for j, a in d.row(i))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "c": format_q(self.c),
            "mtilde": [[i, j, format_q(v)] for (i, j), v in sorted(self.mtilde.items())],
            "caps": {str(i): format_q(v) for i, v in sorted(self.caps.items())},
        }


def allocate_mtilde(d: DoubleSeries, m: Semimeasure, c: QLike, fuel: FuelLike) -> Allocation:
    """
    Raise m~_ij towards c * a_ij whenever m_i grows, cell by cell in column order.

    Args:
        d: The double series.
        m: Row weights, read as ``m.weight(i, t)`` at stages t < fuel.
        c: Positive multiplier.
        fuel: Number of stages of m to read. A semimeasure whose weights
            appear late (such as an a priori probability) is empty at early
            stages, so pass at least the stage its rows of interest settle at.

    Raises:
        ValueError: If c is not positive.
        InvariantBroken: If either cap is ever exceeded.
    """
    cq = to_q(c)
    if cq <= 0:
        raise ValueError(f"Multiplier must be positive, got {cq}")
    alloc = Allocation(c=cq)
    for t in range(steps_of(fuel)):
        added: Dict[Cell, Fraction] = {}
        for i in range(d.n_rows):
            cap = m.weight(i, t)
            alloc.caps[i] = cap
            room = cap - alloc.row_total(i)
            for j, a in d.row(i):
                if room <= 0:
                    break
                have = alloc.mtilde.get((i, j), Fraction(0))
                give = min(cq * a - have, room)
                if give > 0:
                    alloc.mtilde[(i, j)] = have + give
                    added[(i, j)] = give
                    room -= give
            if alloc.row_total(i) > cap:
                raise InvariantBroken(f"Row {i}: allocated {format_q(alloc.row_total(i))} > m_i {format_q(cap)}")
            for j, a in d.row(i):
                if alloc.value(i, j) > cq * a:
                    raise InvariantBroken(f"Cell ({i}, {j}) exceeds c * a_ij")
        alloc.increments.append(added)
        if added:
            alloc.log(f"stage {t}: raised {len(added)} cells")
    return alloc


def combine_allocations(d: DoubleSeries, m: Semimeasure, levels: int, fuel: FuelLike) -> Semimeasure:
    """
    Sum of 2^-n times the allocation at c = 2^(2n), n = 1 .. levels, indexed by Cantor pairs.

    Args:
        d: The double series.
        m: Row weights, read at stages t < fuel.
        levels: Number of levels n to combine.
        fuel: Number of stages of m each allocation reads.

    Raises:
        ValueError: If levels is below one.
    """
    if levels < 1:
        raise ValueError(f"Need at least one level, got {levels}")
    steps = steps_of(fuel)
    allocs = [(pow2(n), allocate_mtilde(d, m, 2 ** (2 * n), steps)) for n in range(1, levels + 1)]
    cells = {pair_index(i, j): (i, j) for (i, j) in d.cells}

    def weight(k: int, f: int) -> Fraction:
        if k not in cells:
            return Fraction(0)
        i, j = cells[k]
        return sum((coef * al.value(i, j, min(f + 1, steps)) for coef, al in allocs), Fraction(0))

    declared = sum((pow2(n) for n in range(1, levels + 1)), Fraction(0)) * m.total(max(steps - 1, 0))
    logger.debug("combined %d allocation levels over %d cells", levels, len(cells))
    return Semimeasure(weight, lambda f: sorted(cells), declared_total=declared, name=f"mtilde({d.name})")


@dataclass
class MeshRefinement:
    """
    A finer series c with groupings that recover coarser series.

    ``groupings[name][k]`` lists the indices of c whose sum is term k of the
    series called ``name``; a zero term has an empty group.
    """

    c: List[Fraction]
    groupings: Dict[str, List[List[int]]] = field(default_factory=dict)
    logs: List[str] = field(default_factory=list)

    def log(self, message: str):
        self.logs.append(message)

    def recover(self, name: str) -> List[Fraction]:
        return [sum((self.c[k] for k in group), Fraction(0)) for group in self.groupings[name]]

    def series(self, known_sup: Optional[QLike] = None) -> LscReal:
        return LscReal.from_terms(SERIES, self.c or [0], known_sup=known_sup, name="refined")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "c": [format_q(v) for v in self.c],
            "groupings": self.groupings,
        }


def _breakpoints(s: LscReal, n_terms: int) -> List[Fraction]:
    if s.term(0) < 0:
        raise ValueError(f"Series {s.name or '<anonymous>'} starts with a negative term")
    return [s.approx(k) for k in range(n_terms)]


def _group(points: Sequence[Fraction], merged: Sequence[Fraction]) -> List[List[int]]:
    # merged[0] == 0 and c_k spans merged[k] .. merged[k+1]
    groups, start = [], 0
    for p in points:
        end = merged.index(p)
        groups.append(list(range(start, end)))
        start = end
    return groups


def mesh_refine(a: LscReal, b: LscReal, common_sum: QLike, n_terms: int = DEFAULT_MESH_TERMS) -> MeshRefinement:
    """
    Cut at the union of both series' partial sums.

    Only breakpoints up to the smaller of the two truncated sums are used, so
    both groupings are exact on the truncation.

    Raises:
        SumMismatch: If a known limit or a partial sum disagrees with ``common_sum``.

    Example:
        >>> r = mesh_refine(LscReal.from_terms("series", ["1/2", "1/2"]),
        ...                 LscReal.from_terms("series", ["1/4", "3/4"]), 1, n_terms=2)
        >>> r.c
        [Fraction(1, 4), Fraction(1, 4), Fraction(1, 2)]
    """
    if n_terms < 1:
        raise ValueError(f"Need at least one term, got {n_terms}")
    total = to_q(common_sum)
    for s in (a, b):
        if s.limit is not None and s.limit != total:
            raise SumMismatch(f"{s.name or 'series'} sums to {format_q(s.limit)}, not {format_q(total)}")
    pa, pb = _breakpoints(a, n_terms), _breakpoints(b, n_terms)
    for name, points in (("a", pa), ("b", pb)):
        if points and points[-1] > total:
            raise SumMismatch(f"Partial sum of {name} passes the common sum: {format_q(points[-1])} > {format_q(total)}")
    reach = min(pa[-1], pb[-1])
    merged = sorted({Fraction(0)} | {p for p in pa + pb if p <= reach})
    result = MeshRefinement(c=[merged[k + 1] - merged[k] for k in range(len(merged) - 1)])
    result.groupings["a"] = _group([p for p in pa if p <= reach], merged)
    result.groupings["b"] = _group([p for p in pb if p <= reach], merged)
    result.log(f"refined up to {format_q(reach)} into {len(result.c)} pieces")
    return result


def split_nonincreasing(r: LscReal, n_terms: int = DEFAULT_MESH_TERMS) -> MeshRefinement:
    """
    Split every term bigger than the previous output piece into equal pieces
    no bigger than it; zero terms are dropped.

    The grouping ``"r"`` recovers the input terms.
    """
    pieces: List[Fraction] = []
    groups: List[List[int]] = []
    for k in range(n_terms):
        t = r.term(k)
        if t < 0:
            raise ValueError(f"Term {k} of {r.name or 'series'} is negative")
        if t == 0:
            groups.append([])
            continue
        parts = 1 if not pieces or t <= pieces[-1] else math.ceil(t / pieces[-1])
        start = len(pieces)
        pieces.extend([t / parts] * parts)
        groups.append(list(range(start, len(pieces))))
    return MeshRefinement(c=pieces, groupings={"r": groups})


def covered_term_indices(d: LscReal, cover: Cover, fuel: FuelLike, n_terms: int) -> List[int]:
    """Indices below n_terms whose closed term interval sits in one interval emitted within ``fuel``."""
    return covered_terms(d, cover.emitted(fuel), n_terms)


def cover_to_semimeasure(r: LscReal, cov: Cover, n: int, fuel: FuelLike, n_terms: Optional[int] = None) -> Semimeasure:
    """
    M(i) = 2^n r_i on the terms covered by ``cov``, zero elsewhere.

    Raises:
        ValueError: If the cover's budget is missing or above 2^-2n.
        LengthBudgetExceeded: If the emitted intervals overrun the budget.
    """
    if cov.length_budget is None or cov.length_budget > pow2(2 * n):
        raise ValueError(f"Cover budget must be at most 2^-{2 * n}, got {cov.length_budget}")
    steps = steps_of(fuel)
    total_length(cov, steps)
    indices = covered_term_indices(r, cov, steps, steps if n_terms is None else n_terms)
    scale_up = 2 ** n
    weights = {i: scale_up * r.term(i) for i in indices}
    logger.debug("cover %s selects %d terms", cov.name, len(indices))
    return Semimeasure.from_weights(weights, declared_total=pow2(n), name=f"M^{n}")
