"""
Finite prefix-free machines and the quantities they induce.

A :class:`Machine` is a finite table of halting programs. It is not a universal
machine: every quantity below (a priori probability, prefix complexity bound,
Omega, the busy beaver functions BP, BP' and T) is exactly computable on it,
and its Omega is a rational, hence not random. The table stands in for the
universal machine so that the mechanisms can be exercised at desk scale.

Entries are revealed in (time, program) order; fuel f reveals every entry with
time <= f.
"""
from __future__ import annotations
import logging
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .SRExceptions import (
    FileFormatError,
    InvariantBroken,
    KraftViolation,
    LimitInconsistent,
    PendingError,
    PrefixFreeViolation,
)
from .SRReal import (
    SEQUENCE,
    FuelLike,
    LscReal,
    QLike,
    Verdict,
    cantor_pair,
    cantor_unpair,
    format_q,
    pow2,
    steps_of,
    to_q,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, order=True)
class Entry:
    """One halting program: ``program`` outputs ``output`` after ``time`` steps."""

    time: int
    program: str
    output: int

    def __post_init__(self):
        if any(ch not in "01" for ch in self.program):
            raise ValueError(f"Program '{self.program}' is not a bit string")
        if self.output < 0:
            raise ValueError(f"Output must be non-negative, got {self.output}")
        if self.time < 1:
            raise ValueError(f"Running time must be positive, got {self.time}")

    def to_line(self) -> str:
        return f"program:{self.program} output:{self.output} time:{self.time}"


class Machine:
    """
    A finite prefix-free machine.

    Args:
        entries: The halting programs.
        name (str): Label used in logs, tables and file names.

    Raises:
        PrefixFreeViolation: If one program is a prefix of another.
        KraftViolation: If the Kraft sum exceeds 1.

    Example:
        >>> M = Machine([Entry(1, "0", 1), Entry(2, "10", 2)])
        >>> M.kraft_sum()
        Fraction(3, 4)
    """

    def __init__(self, entries: Iterable[Entry], name: str = "machine"):
        self.name = name
        by_program: Dict[str, Entry] = {}
        for e in entries:
            seen = by_program.get(e.program)
            if seen is not None:
                if seen == e:
                    warnings.warn(f"Duplicate entry for program '{e.program}' ignored")
                    continue
                raise PrefixFreeViolation(e.program, e.program)
            by_program[e.program] = e
        programs = sorted(by_program)
        for p, q in zip(programs, programs[1:]):
            if q.startswith(p):
                raise PrefixFreeViolation(p, q)
        self.entries: List[Entry] = sorted(by_program.values())
        kraft = self.kraft_sum()
        if kraft > 1:
            raise KraftViolation(f"Kraft sum of {name} is {format_q(kraft)} > 1")
        logger.debug("machine %s: %d entries, Kraft sum %s", name, len(self.entries), kraft)

    # --- construction helpers ---
    @classmethod
    def from_lines(cls, lines: Iterable[str], name: str = "machine", source: str = "<lines>") -> "Machine":
        """
        Parse ``program:<bits> output:<int> time:<int>`` lines; ``#`` starts a comment.

        Raises:
            FileFormatError: For a line that does not have the three fields.
        """
        entries = []
        for lineno, raw in enumerate(lines, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            fields: Dict[str, str] = {}
            for token in line.split():
                key, sep, value = token.partition(":")
                if not sep:
                    raise FileFormatError(source, lineno, f"expected key:value, got '{token}'")
                fields[key] = value
            if set(fields) != {"program", "output", "time"}:
                raise FileFormatError(source, lineno, "need exactly program, output and time")
            try:
                entries.append(Entry(int(fields["time"]), fields["program"], int(fields["output"])))
            except ValueError as exc:
                raise FileFormatError(source, lineno, str(exc)) from exc
        return cls(entries, name=name)

    def to_lines(self) -> List[str]:
        return [e.to_line() for e in self.entries]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "entries": [
                {"program": e.program, "output": e.output, "time": e.time} for e in self.entries
            ],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Machine":
        return cls(
            [Entry(int(d["time"]), d["program"], int(d["output"])) for d in data["entries"]],
            name=data.get("name", "machine"),
        )

    def relabel(self, mapping: Mapping[int, int], name: Optional[str] = None) -> "Machine":
        """Machine with every output n replaced by ``mapping[n]`` (identity where missing)."""
        return Machine(
            [Entry(e.time, e.program, mapping.get(e.output, e.output)) for e in self.entries],
            name=name or f"{self.name}-relabelled",
        )

    # --- basic quantities ---
    def kraft_sum(self) -> Fraction:
        return sum((pow2(len(e.program)) for e in self.entries), Fraction(0))

    @property
    def max_time(self) -> int:
        return max((e.time for e in self.entries), default=0)

    @property
    def max_length(self) -> int:
        return max((len(e.program) for e in self.entries), default=0)

    def outputs(self) -> List[int]:
        return sorted({e.output for e in self.entries})

    def enumeration(self, fuel: Optional[FuelLike] = None) -> List[Entry]:
        """Entries with time <= fuel in (time, program) order; all of them for fuel None."""
        if fuel is None:
            return list(self.entries)
        steps = steps_of(fuel)
        return [e for e in self.entries if e.time <= steps]

    def stats(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "entries": len(self.entries),
            "kraft_sum": format_q(self.kraft_sum()),
            "max_time": self.max_time,
            "max_length": self.max_length,
            "outputs": len(self.outputs()),
        }

    def __repr__(self) -> str:
        return f"Machine({self.name}, {len(self.entries)} entries)"


def load_machine(path: str, name: Optional[str] = None) -> Machine:
    """
    Read and validate a machine file.

    Raises:
        PrefixFreeViolation, KraftViolation, FileFormatError
    """
    with open(path, "r") as fh:
        lines = fh.readlines()
    label = name
    if label is None:
        base = path.replace("\\", "/").rsplit("/", 1)[-1]
        label = base.rsplit(".", 1)[0]
    return Machine.from_lines(lines, name=label, source=path)


class Semimeasure:
    """
    A lower semicomputable semimeasure given stage by stage.

    ``weight(i, fuel)`` is non-decreasing in fuel and ``support(fuel)`` lists the
    indices that may carry weight at that fuel. Every prefix estimate of the
    total stays within ``declared_total``.

    Args:
        weight: Callable ``(i, fuel) -> rational``.
        support: Callable ``fuel -> iterable of indices``.
        declared_total: Upper bound on the total weight, at most 1 for a semimeasure.
        name (str): Label.
    """

    def __init__(
        self,
        weight: Callable[[int, int], Fraction],
        support: Callable[[int], Iterable[int]],
        declared_total: QLike = 1,
        name: str = "m",
        limit: Optional[QLike] = None,
    ):
        self._weight = weight
        self._support = support
        self.declared_total = to_q(declared_total)
        self.name = name
        self.limit = to_q(limit) if limit is not None else None

    @classmethod
    def from_weights(cls, weights: Mapping[int, QLike], declared_total: Optional[QLike] = None, name: str = "m") -> "Semimeasure":
        """A semimeasure whose weights are fully known at fuel 0."""
        fixed = {int(i): to_q(v) for i, v in weights.items() if to_q(v) != 0}
        total = sum(fixed.values(), Fraction(0))
        return cls(
            lambda i, fuel: fixed.get(i, Fraction(0)),
            lambda fuel: sorted(fixed),
            declared_total=total if declared_total is None else declared_total,
            name=name,
            limit=total,
        )

    def weight(self, i: int, fuel: FuelLike) -> Fraction:
        return self._weight(i, steps_of(fuel))

    def support(self, fuel: FuelLike) -> List[int]:
        return sorted(set(self._support(steps_of(fuel))))

    def weights(self, fuel: FuelLike) -> Dict[int, Fraction]:
        steps = steps_of(fuel)
        out = {}
        for i in self.support(steps):
            w = self._weight(i, steps)
            if w:
                out[i] = w
        return out

    def total(self, fuel: FuelLike) -> Fraction:
        """
        Prefix estimate of the total weight.

        Raises:
            InvariantBroken: If the estimate passes ``declared_total``.
        """
        t = sum(self.weights(fuel).values(), Fraction(0))
        if t > self.declared_total:
            raise InvariantBroken(
                f"Semimeasure {self.name}: total {format_q(t)} exceeds declared {format_q(self.declared_total)}"
            )
        return t

    def as_real(self, name: Optional[str] = None) -> LscReal:
        """The total weight as a lower semicomputable real, stage n = fuel n."""
        return LscReal(
            SEQUENCE,
            self.total,
            known_sup=self.declared_total if self.limit is None else self.limit,
            limit=self.limit,
            name=name or f"sum({self.name})",
        )

    def to_dict(self, fuel: FuelLike) -> Dict[str, Any]:
        return {
            "name": self.name,
            "declared_total": format_q(self.declared_total),
            "weights": {str(i): format_q(w) for i, w in self.weights(fuel).items()},
            "total": format_q(self.total(fuel)),
        }


def apriori(M: Machine, fuel: Optional[FuelLike] = None) -> Semimeasure:
    """
    A priori probability m(i) = sum of 2^-|p| over programs p with output i.

    Stage f of the returned semimeasure counts entries with time <= min(f, fuel).
    """
    cap = None if fuel is None else steps_of(fuel)
    by_output: Dict[int, List[Entry]] = {}
    for e in M.entries:
        by_output.setdefault(e.output, []).append(e)

    def effective(f: int) -> int:
        return f if cap is None else min(f, cap)

    def weight(i: int, f: int) -> Fraction:
        limit_time = effective(f)
        return sum(
            (pow2(len(e.program)) for e in by_output.get(i, []) if e.time <= limit_time),
            Fraction(0),
        )

    def support(f: int) -> List[int]:
        limit_time = effective(f)
        return sorted({e.output for e in M.entries if e.time <= limit_time})

    full = omega(M, None if cap is None else cap)
    return Semimeasure(weight, support, declared_total=M.kraft_sum(), name=f"m[{M.name}]", limit=full)


def kp(M: Machine, i: int, fuel: Optional[FuelLike] = None) -> Verdict:
    """
    Upper bound on prefix complexity: length of the shortest program for ``i``
    among the entries revealed within ``fuel``. Pending when there is none;
    integers outside the range of a finite machine stay Pending at every fuel.
    """
    lengths = [len(e.program) for e in M.enumeration(fuel) if e.output == i]
    if not lengths:
        return Verdict.pending()
    return Verdict.confirmed(min(lengths))


def omega(M: Machine, fuel: Optional[FuelLike] = None) -> Fraction:
    """Lower bound on Omega: Kraft sum of the entries revealed within ``fuel``."""
    return sum((pow2(len(e.program)) for e in M.enumeration(fuel)), Fraction(0))


def omega_real(M: Machine) -> LscReal:
    """Omega of ``M`` as a lower semicomputable real, stage n = fuel n."""
    total = omega(M)
    return LscReal(SEQUENCE, lambda n: omega(M, n), limit=total, name=f"Omega[{M.name}]")


def _kp_table(M: Machine) -> Dict[int, int]:
    best: Dict[int, int] = {}
    for e in M.entries:
        k = len(e.program)
        if e.output not in best or k < best[e.output]:
            best[e.output] = k
    return best


def bp(M: Machine, m: int) -> int:
    """Largest n with KP(n) <= m, or 0 if there is none."""
    return max((n for n, k in _kp_table(M).items() if k <= m), default=0)


def bp_prime(M: Machine, m: int) -> int:
    """Least N such that the total a priori probability of all n > N is below 2^-m."""
    weights = apriori(M).weights(M.max_time)
    threshold = pow2(m)
    # the tail only drops when N passes an output, so those are the candidates
    for N in sorted({0} | set(weights)):
        tail = sum((w for n, w in weights.items() if n > N), Fraction(0))
        if tail < threshold:
            return N
    raise InvariantBroken("Tail never drops below the threshold")  # unreachable: the empty tail is 0


def busy_time(M: Machine, m: int) -> int:
    """T(m): largest running time among programs of length <= m, 0 if none."""
    return max((e.time for e in M.entries if len(e.program) <= m), default=0)


def modulus(a: LscReal, eps: QLike, known_limit: QLike, fuel: FuelLike = 10_000) -> int:
    """
    Modulus of convergence: least N with limit - a_n < eps for every n > N.

    Approximations never decrease, so the first n within eps certifies all
    later ones; the answer is that index minus one, clamped at 0.

    Raises:
        LimitInconsistent: If some approximation exceeds ``known_limit``.
        PendingError: If no approximation within ``fuel`` gets close enough.
    """
    eps, limit = to_q(eps), to_q(known_limit)
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    for n in range(steps_of(fuel)):
        value = a.approx(n)
        if value > limit:
            raise LimitInconsistent(n, format_q(value), format_q(limit))
        if limit - value < eps:
            return max(n - 1, 0)
    raise PendingError(f"No approximation within {format_q(eps)} of {format_q(limit)} in {fuel} steps")


def modulus_lower_bound(a: LscReal, eps: QLike, fuel: FuelLike) -> int:
    """
    Lower bound on the modulus when the limit is unknown: the largest n < fuel
    whose distance to the latest approximation is already at least eps.
    """
    eps = to_q(eps)
    steps = steps_of(fuel)
    if steps == 0:
        return 0
    latest = a.approx(steps - 1)
    best = 0
    for n in range(steps):
        if latest - a.approx(n) >= eps:
            best = n
    return best


@dataclass
class SolovayRatioTrace:
    """Ratios r_i / m(i) for the indices where m(i) > 0, and the flagged zero indices."""

    ratios: Dict[int, Fraction]
    flagged: List[int]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "ratios": [{"index": i, "ratio": format_q(q)} for i, q in sorted(self.ratios.items())],
            "flagged": list(self.flagged),
        }


def solovay_ratio(r: LscReal, M: Machine, fuel: Optional[FuelLike] = None, n_terms: int = 32) -> SolovayRatioTrace:
    """
    Trace of r_i / m(i) over the first ``n_terms`` indices.

    Indices with m(i) = 0 at the given fuel are flagged instead of divided.
    """
    m = apriori(M)
    steps = M.max_time if fuel is None else steps_of(fuel)
    ratios: Dict[int, Fraction] = {}
    flagged: List[int] = []
    for i in range(n_terms):
        mi = m.weight(i, steps)
        if mi > 0:
            ratios[i] = r.term(i) / mi
        else:
            flagged.append(i)
    return SolovayRatioTrace(ratios, flagged)


def prefix_chain_machine(n: int, name: Optional[str] = None) -> Machine:
    """Programs 1^i 0 -> i with time i+1, for i < n; m(i) = 2^-(i+1)."""
    return Machine(
        [Entry(i + 1, "1" * i + "0", i) for i in range(n)],
        name=name or f"chain{n}",
    )


def self_timing_machine(times: Sequence[int], name: str = "self-timing") -> Machine:
    """
    A machine whose programs output their own running time.

    The i-th program is 1^i 0 and runs ``times[i]`` steps. The times are fixed
    first and the outputs set equal to them, so T(m) is produced by a program
    of length at most m.
    """
    return Machine(
        [Entry(int(t), "1" * i + "0", int(t)) for i, t in enumerate(times)],
        name=name,
    )


def self_timing_family(sizes: Sequence[int], seed: int = 0) -> List[Machine]:
    """Self-timing machines with random non-decreasing running times."""
    rng = np.random.default_rng(seed)
    family = []
    for size in sizes:
        steps = rng.integers(1, 6, size=size)
        times = np.cumsum(steps).tolist()
        family.append(self_timing_machine(times, name=f"self-timing-{size}"))
    return family


def measured_constant(M: Machine) -> int:
    """
    The least c with KP(T(m)) <= m + c for every m up to the longest program.

    Raises:
        PendingError: If some T(m) is not an output of the machine.
    """
    table = _kp_table(M)
    c = 0
    for m in range(1, M.max_length + 1):
        t = busy_time(M, m)
        if t == 0:
            continue
        if t not in table:
            raise PendingError(f"T({m}) = {t} is not an output of {M.name}")
        c = max(c, table[t] - m)
    return c


def rows_from_machine(M: Machine, n_rows: int, fuel: Optional[FuelLike] = None) -> List[List[Fraction]]:
    """
    Row masses m_{i,j} = m(<i, j>) for rows i < n_rows.

    Columns run up to the largest column index any output reaches.
    """
    weights = apriori(M, fuel).weights(M.max_time if fuel is None else fuel)
    cells: Dict[Tuple[int, int], Fraction] = {}
    width = 0
    for n, w in weights.items():
        i, j = cantor_unpair(n)
        if i < n_rows:
            cells[(i, j)] = w
            width = max(width, j + 1)
    return [[cells.get((i, j), Fraction(0)) for j in range(width)] for i in range(n_rows)]


def pair_index(i: int, j: int) -> int:
    """Single index of the pair (i, j) used by pair-indexed semimeasures."""
    return cantor_pair(i, j)
