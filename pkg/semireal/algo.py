"""
Experiments and seeded instance generators built on the semireal modules.

The generators draw from ``numpy.random.default_rng(seed)`` and only ever emit
exact rationals, so a fixed seed always
produces the same instance.
"""
from __future__ import annotations
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from .SRCover import OPEN, Interval
from .SRMachine import Machine, apriori, bp, bp_prime, busy_time, modulus, prefix_chain_machine
from .SRPainter import PaintResult, painter
from .SRReal import SERIES, LscReal, QLike, format_q, pow2, scale, seq_from_series, to_q
from .SRTransforms import DoubleSeries

DYADIC_BITS = 10


def gap_experiment(machines: Sequence[Machine], m_max: Optional[int] = None) -> pd.DataFrame:
    """
    Tabulate BP(m), BP'(m), their gap and T(m) for every machine.

    Args:
        machines: The machines to compare.
        m_max: Largest m; defaults to each machine's longest program.

    Returns:
        A DataFrame with columns machine, m, bp, bp_prime, gap, busy_time.

    Example:
        >>> df = gap_experiment([prefix_chain_machine(3)])
        >>> list(df["gap"] >= 0)
        [True, True, True, True]
    """
    records = []
    for M in machines:
        top = M.max_length if m_max is None else m_max
        for m in range(top + 1):
            b, bprime = bp(M, m), bp_prime(M, m)
            records.append(
                {
                    "machine": M.name,
                    "m": m,
                    "bp": b,
                    "bp_prime": bprime,
                    "gap": bprime - b,
                    "busy_time": busy_time(M, m),
                }
            )
    return pd.DataFrame.from_records(records, columns=["machine", "m", "bp", "bp_prime", "gap", "busy_time"])


def modulus_profile(a: LscReal, known_limit: QLike, m_max: int, fuel: int = 10_000) -> pd.DataFrame:
    """The modulus N(2^-m) for m = 0 .. m_max as a DataFrame (eps as ``num/den``)."""
    records = [
        {"m": m, "eps": format_q(pow2(m)), "modulus": modulus(a, pow2(m), known_limit, fuel)}
        for m in range(m_max + 1)
    ]
    return pd.DataFrame.from_records(records, columns=["m", "eps", "modulus"])


def ratio_painter_run(M: Machine, r: LscReal, epsilon: QLike, fuel: int, doubling: bool = True) -> PaintResult:
    """
    Paint with h_i = epsilon * m(i) from the partial sums of r.

    When r_i / m(i) tends to 0, the limit of r ends up painted while the total
    paint stays below epsilon (twice that with doubling).
    """
    eps = to_q(epsilon)
    m = apriori(M)
    steps = max(M.max_time, 1)
    h = [eps * m.weight(i, steps) for i in range(fuel)]
    return painter(seq_from_series(r), h, fuel, doubling=doubling)


def surrogate_series() -> LscReal:
    """r_i = 2^-(2i+1), summing to 2/3; r_i / m(i) = 2^-i on the prefix chain machine."""
    return LscReal(SERIES, lambda i: pow2(2 * i + 1), limit=Fraction(2, 3), name="surrogate")


def surrogate_painter_run(n: int = 110, epsilon: QLike = Fraction(1, 4)) -> PaintResult:
    """The bundled end-to-end painter instance on the prefix chain machine."""
    return ratio_painter_run(prefix_chain_machine(n), surrogate_series(), epsilon, n)


# --- seeded generators ---
def dyadic(rng: np.random.Generator, low: int = 1, high: Optional[int] = None, bits: int = DYADIC_BITS) -> Fraction:
    """A random k / 2^bits with low <= k < high."""
    top = (1 << bits) if high is None else high
    return Fraction(int(rng.integers(low, top)), 1 << bits)


def random_geometric(rng: np.random.Generator, name: str = "") -> LscReal:
    """A computable real limit - gap * ratio^n with random dyadic parameters."""
    limit = dyadic(rng)
    gap = dyadic(rng, 1, int(limit * (1 << DYADIC_BITS)) + 1)
    ratio = Fraction(int(rng.integers(1, 4)), 4)
    return LscReal.geometric(limit, gap, ratio, name=name or "geometric")


def random_sum_pair(rng: np.random.Generator) -> Tuple[LscReal, LscReal]:
    """A computable alpha and a computable non-negative rho."""
    return random_geometric(rng, "alpha"), random_geometric(rng, "rho")


def random_positive_series(rng: np.random.Generator, n_terms: int, name: str = "v") -> LscReal:
    """A finite series of positive rational terms that sums to exactly 1."""
    raw = [dyadic(rng) for _ in range(n_terms)]
    total = sum(raw, Fraction(0))
    return LscReal.from_terms(SERIES, [t / total for t in raw], name=name)


def random_split_instance(rng: np.random.Generator, n_terms: int = 12) -> Tuple[LscReal, LscReal, Fraction]:
    """(v, alpha, q) with alpha = q * sum(v) and q in (0, 1)."""
    v = random_positive_series(rng, n_terms)
    q = Fraction(int(rng.integers(1, 16)), 16)
    alpha = scale(seq_from_series(v), q)
    return v, alpha, q


def random_union_bound_instance(
    rng: np.random.Generator, c: QLike, n_points: int = 6
) -> Tuple[List[Interval], Dict[Fraction, Fraction]]:
    """
    Open intervals around weighted points, each of length at most 2 * weight / c.

    Weights are dyadic and add up to at most 1.
    """
    cq = to_q(c)
    weights: Dict[Fraction, Fraction] = {}
    raw = [dyadic(rng) for _ in range(n_points)]
    total = sum(raw, Fraction(0))
    for w in raw:
        point = dyadic(rng, 0)
        weights[point] = weights.get(point, Fraction(0)) + w / total
    intervals = []
    for point, w in sorted(weights.items()):
        length = 2 * w / cq * Fraction(int(rng.integers(1, 9)), 8)
        left_share = Fraction(int(rng.integers(1, 8)), 8)
        intervals.append(Interval(point - left_share * length, point + (1 - left_share) * length, OPEN))
    return intervals, weights


def random_painter_schedule(rng: np.random.Generator, n: int) -> Tuple[LscReal, List[Fraction]]:
    """Non-decreasing starting points and non-negative paint amounts."""
    starts = np.cumsum(rng.integers(0, 4, size=n)).tolist()
    points = [Fraction(int(s), 16) for s in starts]
    paint = [Fraction(int(rng.integers(0, 8)), 32) for _ in range(n)]
    return LscReal.from_terms("sequence", points, name="starts"), paint


def random_row_enumeration(rng: np.random.Generator, n_rows: int, n_columns: int) -> List[List[Fraction]]:
    """Row increments of a double semimeasure with total mass at most 1."""
    raw = rng.integers(0, 4, size=(n_rows, n_columns))
    total = int(raw.sum()) or 1
    return [[Fraction(int(x), total) for x in row] for row in raw]


def random_double_series(rng: np.random.Generator, n_rows: int, n_columns: int) -> DoubleSeries:
    """A sparse double series of dyadic cells."""
    cells = {}
    for i in range(n_rows):
        for j in range(n_columns):
            if rng.random() < 0.6:
                cells[(i, j)] = Fraction(int(rng.integers(1, 16)), 1 << (i + j + 4))
    return DoubleSeries(cells, name="random")


def random_equal_sum_pair(rng: np.random.Generator, n_terms: int, total: QLike = 1) -> Tuple[LscReal, LscReal]:
    """Two finite series of n_terms non-negative terms with the same sum."""
    t = to_q(total)

    def one(name: str) -> LscReal:
        cuts = sorted(Fraction(int(k), 64) * t for k in rng.integers(0, 65, size=n_terms - 1))
        points = [Fraction(0)] + cuts + [t]
        return LscReal.from_terms(SERIES, [points[k + 1] - points[k] for k in range(n_terms)], name=name)

    return one("a"), one("b")
