"""
Threshold construction of a computable table a_{ij} from an enumerated
double semimeasure m_{ij}.

Each row's running mass is watched column by column. When it reaches a power
2^-k (k >= 1) larger than every threshold the row has already reached, the
largest such threshold is written into the current column; all other cells
are zero. Every row then sums to at most twice its mass and holds a cell worth
at least half of it.
"""
from __future__ import annotations
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence

import pandas as pd

from .SRExceptions import InvariantBroken
from .SRReal import QLike, format_q, pow2, to_q

logger = logging.getLogger(__name__)


def largest_threshold(mass: Fraction) -> Optional[int]:
    """Smallest k >= 1 with 2^-k <= mass, or None when mass is zero."""
    if mass <= 0:
        return None
    k = 1
    while pow2(k) > mass:
        k += 1
    return k


@dataclass
class SolovayTable:
    """
    The a-table next to the m-table it was built from.

    Attributes:
        m: Row increments m_{ij}, one column per enumeration step.
        a: Threshold values, same shape as ``m``.
        thresholds: Per row, the exponents k whose threshold 2^-k was written.
        logs: Construction log.
    """

    m: List[List[Fraction]]
    a: List[List[Fraction]]
    thresholds: List[List[int]] = field(default_factory=list)
    logs: List[str] = field(default_factory=list)

    def log(self, message: str):
        self.logs.append(message)

    def row_mass(self, i: int) -> Fraction:
        return sum(self.m[i], Fraction(0))

    def total_m(self) -> Fraction:
        return sum((self.row_mass(i) for i in range(len(self.m))), Fraction(0))

    def total_a(self) -> Fraction:
        return sum((sum(row, Fraction(0)) for row in self.a), Fraction(0))

    def check(self) -> bool:
        """
        Verify both table bounds.

        Raises:
            InvariantBroken: If the a-table outweighs twice the m-table, or a
                row with mass has no cell worth half of it.
        """
        if self.total_a() > 2 * self.total_m():
            raise InvariantBroken(
                f"Table sum {format_q(self.total_a())} exceeds twice the mass {format_q(2 * self.total_m())}"
            )
        for i, row in enumerate(self.a):
            mass = self.row_mass(i)
            if mass > 0 and 2 * max(row, default=Fraction(0)) < mass:
                raise InvariantBroken(f"Row {i}: no cell reaches half the row mass {format_q(mass)}")
        return True

    def to_frame(self) -> pd.DataFrame:
        """Long table with one line per cell; rationals as ``num/den`` strings."""
        records = []
        for i, (mrow, arow) in enumerate(zip(self.m, self.a)):
            running = Fraction(0)
            for j, (mv, av) in enumerate(zip(mrow, arow)):
                running += mv
                records.append(
                    {"row": i, "column": j, "m": format_q(mv), "row_mass": format_q(running), "a": format_q(av)}
                )
        return pd.DataFrame.from_records(records, columns=["row", "column", "m", "row_mass", "a"])

    def to_dict(self) -> Dict[str, Any]:
        return {
            "a": [[format_q(v) for v in row] for row in self.a],
            "thresholds": self.thresholds,
            "total_a": format_q(self.total_a()),
            "total_m": format_q(self.total_m()),
        }


def build_solovay_table(m_rows: Sequence[Sequence[QLike]]) -> SolovayTable:
    """
    Build the threshold table, filling zeros while a row waits.

    Args:
        m_rows: Row increments; ``m_rows[i][j]`` is the mass row i gains at
            enumeration step j. Rows may have different lengths.

    Raises:
        ValueError: On negative increments.

    Example:
        >>> t = build_solovay_table([["1/4", "1/8"]])
        >>> t.a
        [[Fraction(1, 4), Fraction(0, 1)]]
    """
    m = [[to_q(v) for v in row] for row in m_rows]
    table = SolovayTable(m=m, a=[])
    for i, row in enumerate(m):
        running = Fraction(0)
        reached: Optional[int] = None
        arow: List[Fraction] = []
        written: List[int] = []
        for j, inc in enumerate(row):
            if inc < 0:
                raise ValueError(f"Negative increment {format_q(inc)} at row {i}, column {j}")
            running += inc
            k = largest_threshold(running)
            if k is not None and (reached is None or k < reached):
                arow.append(pow2(k))
                written.append(k)
                reached = k
                table.log(f"row {i}, column {j}: mass {format_q(running)} reached 1/{2 ** k}")
            else:
                arow.append(Fraction(0))
        table.a.append(arow)
        table.thresholds.append(written)
    logger.debug("threshold table: %d rows, total a %s", len(m), format_q(table.total_a()))
    return table
