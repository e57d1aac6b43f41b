"""
Command-line front end: ``semireal <command> [options]``.

Every command loads its inputs (files or bundled corpus names), runs one
library operation with an explicit fuel and prints a schema-versioned JSON
document (or CSV / plain text where that makes sense). Exit status is 0 on
success, 1 on a domain error and 2 on a usage error.
"""
from __future__ import annotations
import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import jsonschema
import numpy as np
import pandas as pd

from . import __version__
from .SRCover import contains, total_length, transform_cover, u_c_cover, union_bound
from .SRDataProcessor import SRDataProcessor, dumps, make_document
from .SRExceptions import SemirealError
from .SRGame import (
    ConstantStrategy,
    cover_from_strategy,
    play,
    strategy_from_cover,
    sum_strategy,
    wset_check,
    wset_from_cover,
)
from .SRMachine import (
    Semimeasure,
    bp,
    bp_prime,
    busy_time,
    kp,
    omega,
    rows_from_machine,
    solovay_ratio,
)
from .SRPainter import painter
from .SRRace import race, race_family
from .SRReal import SERIES, LscReal, format_q, parse_q, scale, seq_from_series
from .SRReduction import diff_to_lsc, identity_witness, split_along, weighted_complete, witness_against_scale, witness_from_sum
from .SRSolovayTable import build_solovay_table
from .SRTransforms import allocate_mtilde, combine_allocations, cover_to_semimeasure, mesh_refine, regroup, split_nonincreasing
from . import algo

logger = logging.getLogger(__name__)

FUEL_ENV = "SEMIREAL_FUEL_DEFAULT"
FALLBACK_FUEL = 1000
FORMATS = ("json", "csv", "plain")
WITNESS_SAMPLES = 20
PREFIX_TERMS = 32

MACHINE_ACTIONS = ("stats", "omega", "kp", "bp", "bpprime", "t", "ucover")


class UsageError(Exception):
    """A command line that names a missing input or an impossible option."""


def default_fuel() -> int:
    """Fuel from ``SEMIREAL_FUEL_DEFAULT``, or 1000."""
    raw = os.environ.get(FUEL_ENV)
    if raw is None:
        return FALLBACK_FUEL
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{FUEL_ENV} must be an integer, got '{raw}'")


@dataclass
class RunConfig:
    """
    One validated invocation.

    Attributes:
        command: Subcommand name.
        subcommand: Action for ``machine``, otherwise None.
        fuel: Enumeration budget.
        inputs: Input names or paths by role (``real``, ``cover``, ...).
        output_format: ``json``, ``csv`` or ``plain``.
        seed: Seed for generated instances.
        options: Remaining numeric and flag options.
    """

    command: str
    subcommand: Optional[str] = None
    fuel: int = FALLBACK_FUEL
    inputs: Dict[str, Any] = field(default_factory=dict)
    output_format: str = "json"
    seed: int = 0
    options: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.fuel < 0:
            raise UsageError(f"--fuel must be non-negative, got {self.fuel}")
        if self.output_format not in FORMATS:
            raise UsageError(f"--format must be one of {FORMATS}, got '{self.output_format}'")

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        values = dict(vars(args))
        command = values.pop("command")
        subcommand = values.pop("action", None)
        fuel = values.pop("fuel")
        output_format = values.pop("format")
        seed = values.pop("seed")
        values.pop("verbose", None)
        inputs = {k: values.pop(k) for k in list(values) if k in INPUT_ROLES and values[k] is not None}
        return cls(
            command=command,
            subcommand=subcommand,
            fuel=default_fuel() if fuel is None else fuel,
            inputs=inputs,
            output_format=output_format,
            seed=seed,
            options=values,
        )

    def input(self, role: str) -> Any:
        if role not in self.inputs:
            raise UsageError(f"--{role.replace('_', '-')} is required for '{self.command}'")
        return self.inputs[role]


INPUT_ROLES = ("real", "alpha", "beta", "rho", "cover", "cover_b", "real_b", "weights", "machine", "double", "rows", "m_weights", "a", "b", "paint")


@dataclass
class Artifact:
    """What a command produced, ready to be rendered in any format."""

    payload: Dict[str, Any]
    frame: Optional[pd.DataFrame] = None
    plain: Optional[List[str]] = None


# --- helpers ---
def _q(text: Optional[str], flag: str) -> Optional[Fraction]:
    if text is None:
        return None
    try:
        return parse_q(text)
    except ValueError:
        raise UsageError(f"{flag} expects a rational num/den, got '{text}'")


def _require_q(cfg: RunConfig, key: str) -> Fraction:
    value = _q(cfg.options.get(key), f"--{key.replace('_', '-')}")
    if value is None:
        raise UsageError(f"--{key.replace('_', '-')} is required for '{cfg.command}'")
    return value


def _as_sequence(a: LscReal) -> LscReal:
    return seq_from_series(a) if a.kind == SERIES else a


def _prefix(a: LscReal, n: int) -> List[str]:
    return [format_q(a.approx(i)) for i in range(n)]


def _records(frame: pd.DataFrame) -> List[Dict[str, Any]]:
    # round-trip through JSON so numpy scalars become plain ints
    return json.loads(frame.to_json(orient="records"))


# --- commands ---
def cmd_eval(cfg: RunConfig, io: SRDataProcessor) -> Artifact:
    names = cfg.input("real")
    reals = [io.load(n, "real") for n in names]
    weights = cfg.options.get("weights_list")
    if weights:
        ws = [_q(w, "--weights-list") for w in weights.split(",")]
        a = weighted_complete([_as_sequence(r) for r in reals], ws)
    elif len(reals) == 1:
        a = reals[0]
    else:
        raise UsageError("several --real need --weights-list")
    approximations = [format_q(v) for v in a.approximations(cfg.fuel)]
    payload = {
        "real": a.name,
        "kind": a.kind,
        "fuel": cfg.fuel,
        "approximations": approximations,
        "stages": [[i, format_q(v)] for i, v in a.stages(cfg.fuel)],
    }
    return Artifact(payload, plain=approximations)


def cmd_reduce(cfg: RunConfig, io: SRDataProcessor) -> Artifact:
    alpha = _as_sequence(io.load(cfg.input("alpha"), "real"))
    beta_raw = io.load(cfg.input("beta"), "real")
    beta = _as_sequence(beta_raw)
    c = int(cfg.options.get("c", 1))
    if c < 1:
        raise UsageError(f"--c must be a positive integer, got {c}")
    outcome = race(alpha, scale(beta, c), cfg.fuel)
    holes = outcome.holes_series()
    w = witness_against_scale(alpha, beta, c, holes)
    checks: Dict[str, Any] = {"checked": 0, "passed": 0, "skipped": True}
    if alpha.limit is not None and beta.limit is not None:
        points = [c * beta.approx(i) for i in range(min(cfg.fuel, WITNESS_SAMPLES))]
        passed = sum(1 for r in points if w.check_exact(r, cfg.fuel))
        checks = {"checked": len(points), "passed": passed, "skipped": False}
    payload: Dict[str, Any] = {
        "status": outcome.status,
        "c": c,
        "fuel": cfg.fuel,
        "witness_checks": checks,
        "holes_prefix": [format_q(h) for h in outcome.holes[:PREFIX_TERMS]],
    }
    if cfg.options.get("split"):
        if c != 1 or beta_raw.kind != SERIES:
            raise UsageError("--split needs --c 1 and a series for --beta")
        u = split_along(beta_raw, w, phi_fuel=cfg.fuel)
        payload["split"] = {
            "u_prefix": [format_q(t) for t in u.prefix(min(cfg.fuel, PREFIX_TERMS))],
            "case_counts": {str(k): v for k, v in u.case_counts.items()},
        }
    if cfg.options.get("difference"):
        d = diff_to_lsc(w.against_scaled_beta(), scale(beta, c), stall_limit=max(cfg.fuel, 1))
        payload["difference_prefix"] = _prefix(d, min(cfg.fuel, PREFIX_TERMS))
    return Artifact(payload)


def cmd_race(cfg: RunConfig, io: SRDataProcessor) -> Artifact:
    alpha = _as_sequence(io.load(cfg.input("alpha"), "real"))
    beta = _as_sequence(io.load(cfg.input("beta"), "real"))
    levels = int(cfg.options.get("levels") or 1)
    outcomes = race_family(alpha, beta, levels, cfg.fuel) if levels > 1 else [race(alpha, beta, cfg.fuel)]
    runs = []
    for k, outcome in enumerate(outcomes):
        run = outcome.to_dict()
        run["level"] = k
        if outcome.cover_produced:
            run["open_cover"] = outcome.to_open_cover().to_dict(len(outcome.intervals))
        runs.append(run)
    frame = pd.DataFrame.from_records(
        [{"level": r["level"], "status": r["status"], "steps": r["steps"], "intervals": len(r["intervals"])} for r in runs]
    )
    return Artifact({"runs": runs}, frame=frame)


def cmd_cover_transform(cfg: RunConfig, io: SRDataProcessor) -> Artifact:
    cover = io.load(cfg.input("cover"), "cover")
    alpha = _as_sequence(io.load(cfg.input("alpha"), "real"))
    if "rho" in cfg.inputs:
        rho = _as_sequence(io.load(cfg.input("rho"), "real"))
        w = witness_from_sum(alpha, rho)
        beta = w.beta
    else:
        w = identity_witness(alpha)
        beta = alpha
    out = transform_cover(cover, w, alpha, beta)
    emitted = out.to_dict(cfg.fuel)
    payload = {
        "input": cover.to_dict(cfg.fuel),
        "output": emitted,
        "input_contains_beta": contains(cover, beta, cfg.fuel).to_dict(),
        "output_contains_alpha": contains(out, alpha, cfg.fuel).to_dict(),
        "total_length": format_q(total_length(out, cfg.fuel)),
    }
    return Artifact(payload)


def cmd_union_bound(cfg: RunConfig, io: SRDataProcessor) -> Artifact:
    cover = io.load(cfg.input("cover"), "cover")
    weights = io.load(cfg.input("weights"), "weights")
    result = union_bound(cover.emitted(cfg.fuel), weights, _require_q(cfg, "c"))
    return Artifact(result.to_dict())


def cmd_game(cfg: RunConfig, io: SRDataProcessor) -> Artifact:
    epsilon = _require_q(cfg, "epsilon")
    strategy = cfg.options.get("strategy") or "from-cover"
    a = _as_sequence(io.load(cfg.input("real"), "real"))
    if strategy == "from-cover":
        cover = io.load(cfg.input("cover"), "cover")
        make = lambda: strategy_from_cover(cover)  # noqa: E731
    elif strategy == "sum":
        b = _as_sequence(io.load(cfg.input("real_b"), "real"))
        cov_a, cov_b = io.load(cfg.input("cover"), "cover"), io.load(cfg.input("cover_b"), "cover")
        make = lambda: sum_strategy(cov_a, cov_b, a, b)  # noqa: E731
    else:
        delta = _require_q(cfg, "delta")
        make = lambda: ConstantStrategy(delta)  # noqa: E731
    s = make()
    stream = s.stream if strategy == "sum" else a
    trace = play(s, stream, epsilon, cfg.fuel)
    payload = {"strategy": s.to_dict(), "trace": trace.to_dict()}
    if cfg.options.get("as_cover"):
        payload["cover"] = cover_from_strategy(make(), stream, epsilon, cfg.fuel).to_dict(cfg.fuel)
    return Artifact(payload, plain=trace.logs)


def cmd_paint(cfg: RunConfig, io: SRDataProcessor) -> Artifact:
    doubling = not cfg.options.get("no_doubling")
    if "machine" in cfg.inputs:
        M = io.load(cfg.input("machine"), "machine")
        r = io.load(cfg.input("real"), "real")
        result = algo.ratio_painter_run(M, r, _require_q(cfg, "epsilon"), cfg.fuel, doubling=doubling)
        starts = seq_from_series(r)
    else:
        starts = _as_sequence(io.load(cfg.input("real"), "real"))
        paint = io.load(cfg.input("paint"), "real")
        result = painter(starts, [paint.term(i) for i in range(cfg.fuel)], cfg.fuel, doubling=doubling)
    cover = result.cover()
    if cfg.options.get("out"):
        io.to_txt(cover, cfg.options["out"], fuel=cfg.fuel)
    payload = result.to_dict()
    if starts.limit is not None:
        payload["limit_painted"] = result.is_painted(starts.limit)
    return Artifact(payload, plain=[str(iv) for _, iv in result.pieces])


def cmd_wset(cfg: RunConfig, io: SRDataProcessor) -> Artifact:
    d = io.load(cfg.input("real"), "real")
    if d.kind != SERIES:
        raise UsageError("--real must be a series for 'wset'")
    if "cover" in cfg.inputs:
        indices = sorted(wset_from_cover(d, io.load(cfg.input("cover"), "cover"), cfg.fuel))
        return Artifact({"direction": "backward", "indices": indices})
    epsilon = _require_q(cfg, "epsilon")
    start = cfg.options.get("from_index")
    listed = cfg.options.get("indices")
    if listed:
        W: Any = {int(x) for x in listed.split(",")}
    elif start is not None:
        W = lambda i: i >= int(start)  # noqa: E731
    else:
        raise UsageError("'wset' needs --indices, --from-index or --cover")
    cover = wset_check(d, W, epsilon, cfg.fuel, doubling=bool(cfg.options.get("doubling")))
    payload = {
        "direction": "forward",
        "cover": cover.to_dict(cfg.fuel),
        "contains_limit": contains(cover, seq_from_series(d), cfg.fuel).to_dict(),
    }
    return Artifact(payload)


def cmd_machine(cfg: RunConfig, io: SRDataProcessor) -> Artifact:
    M = io.load(cfg.inputs.get("machine", "default"), "machine")
    action = cfg.subcommand
    m = cfg.options.get("m")
    if action in ("bp", "bpprime", "t") and m is None:
        raise UsageError(f"--m is required for 'machine {action}'")
    if action == "stats":
        payload = M.stats()
        plain = [f"{k}: {v}" for k, v in payload.items()]
    elif action == "omega":
        value = omega(M, cfg.fuel)
        payload = {"machine": M.name, "fuel": cfg.fuel, "omega": format_q(value)}
        plain = [format_q(value)]
    elif action == "kp":
        n = cfg.options.get("n")
        if n is None:
            raise UsageError("--n is required for 'machine kp'")
        verdict = kp(M, int(n), cfg.fuel)
        payload = {"machine": M.name, "n": int(n), "kp": verdict.to_dict()}
        plain = [str(verdict.payload) if verdict.is_confirmed else "pending"]
    elif action == "ucover":
        c = int(cfg.options.get("c") or 0)
        payload = {"machine": M.name, "cover": u_c_cover(M, c, cfg.fuel).to_dict(cfg.fuel)}
        plain = None
    else:
        fn: Callable[[Any, int], int] = {"bp": bp, "bpprime": bp_prime, "t": busy_time}[action]
        value = fn(M, int(m))
        payload = {"machine": M.name, "m": int(m), "value": value}
        plain = [str(value)]
    payload["action"] = action
    return Artifact(payload, plain=plain)


def cmd_solovay_fn(cfg: RunConfig, io: SRDataProcessor) -> Artifact:
    if "rows" in cfg.inputs:
        d = io.load(cfg.input("rows"), "double-series")
        rows = [[d.term(i, j) for j in range(d.n_columns)] for i in range(d.n_rows)]
    elif "machine" in cfg.inputs:
        rows = rows_from_machine(io.load(cfg.input("machine"), "machine"), int(cfg.options.get("n_rows") or 4), cfg.fuel)
    else:
        n_rows = int(cfg.options.get("n_rows") or 4)
        rows = algo.random_row_enumeration(np.random.default_rng(cfg.seed), n_rows, n_rows)
    table = build_solovay_table(rows)
    table.check()
    return Artifact(table.to_dict(), frame=table.to_frame())


def cmd_solovay_ratio(cfg: RunConfig, io: SRDataProcessor) -> Artifact:
    r = io.load(cfg.input("real"), "real")
    M = io.load(cfg.inputs.get("machine", "default"), "machine")
    trace = solovay_ratio(r, M, cfg.fuel, n_terms=int(cfg.options.get("n_terms") or PREFIX_TERMS))
    payload = trace.to_dict()
    frame = pd.DataFrame.from_records(payload["ratios"], columns=["index", "ratio"])
    return Artifact(payload, frame=frame)


def cmd_regroup(cfg: RunConfig, io: SRDataProcessor) -> Artifact:
    d = io.load(cfg.input("double"), "double-series")
    A = regroup(d)
    sums = [format_q(A.term(i)) for i in range(d.n_rows)]
    return Artifact({"rows": sums, "total": format_q(d.total())}, plain=sums)


def cmd_mtilde(cfg: RunConfig, io: SRDataProcessor) -> Artifact:
    d = io.load(cfg.input("double"), "double-series")
    raw = io.load(cfg.input("m_weights"), "weights")
    m = Semimeasure.from_weights({int(k): v for k, v in raw.items()}, name="m")
    levels = cfg.options.get("levels")
    if levels:
        combined = combine_allocations(d, m, int(levels), max(cfg.fuel, 1))
        return Artifact({"levels": int(levels), "combined": combined.to_dict(max(cfg.fuel, 1))})
    alloc = allocate_mtilde(d, m, _require_q(cfg, "c"), max(cfg.fuel, 1))
    return Artifact({"allocation": alloc.to_dict()})


def cmd_mesh(cfg: RunConfig, io: SRDataProcessor) -> Artifact:
    a = io.load(cfg.input("a"), "real")
    n_terms = int(cfg.options.get("n_terms") or PREFIX_TERMS)
    if cfg.options.get("split"):
        result = split_nonincreasing(a, n_terms)
    else:
        b = io.load(cfg.input("b"), "real")
        result = mesh_refine(a, b, _require_q(cfg, "sum"), n_terms)
    payload = result.to_dict()
    payload["recovered"] = {name: [format_q(v) for v in result.recover(name)] for name in result.groupings}
    return Artifact(payload, plain=payload["c"])


def cmd_covermeasure(cfg: RunConfig, io: SRDataProcessor) -> Artifact:
    r = io.load(cfg.input("real"), "real")
    cover = io.load(cfg.input("cover"), "cover")
    n = int(cfg.options.get("n") or 1)
    measure = cover_to_semimeasure(r, cover, n, cfg.fuel)
    return Artifact({"n": n, "semimeasure": measure.to_dict(cfg.fuel)})


def cmd_gap_experiment(cfg: RunConfig, io: SRDataProcessor) -> Artifact:
    names = cfg.inputs.get("machine") or io.corpus("machine")
    machines = [io.load(n, "machine") for n in names]
    m_max = cfg.options.get("m_max")
    frame = algo.gap_experiment(machines, None if m_max is None else int(m_max))
    payload: Dict[str, Any] = {"rows": _records(frame)}
    if "real" in cfg.inputs:
        a = _as_sequence(io.load(cfg.input("real"), "real"))
        if a.limit is None:
            raise UsageError("--real needs a known limit for the modulus profile")
        profile = algo.modulus_profile(a, a.limit, int(m_max or 8), max(cfg.fuel, 1))
        payload["modulus_profile"] = _records(profile)
    return Artifact(payload, frame=frame)


COMMANDS: Dict[str, Tuple[Callable[[RunConfig, SRDataProcessor], Artifact], str]] = {
    "eval": (cmd_eval, "print the approximations of a real (or a weighted sum of reals)"),
    "reduce": (cmd_reduce, "fuel-bounded evidence for alpha <= c*beta: race, witness checks, split"),
    "race": (cmd_race, "run the interval-shifting race of alpha against beta"),
    "cover-transform": (cmd_cover_transform, "move a cover of beta onto alpha along a reduction"),
    "union-bound": (cmd_union_bound, "certify the 4/c bound for a union of dense intervals"),
    "game": (cmd_game, "play the prediction game"),
    "paint": (cmd_paint, "run the painter construction"),
    "wset": (cmd_wset, "cover from a W-set of terms, or W-set from a cover"),
    "machine": (cmd_machine, "a priori probability, KP, Omega, BP, BP', T and U_c on a finite machine"),
    "solovay-fn": (cmd_solovay_fn, "threshold table from a double semimeasure"),
    "solovay-ratio": (cmd_solovay_ratio, "trace r_i / m(i)"),
    "regroup": (cmd_regroup, "row sums of a double series"),
    "mtilde": (cmd_mtilde, "greedy allocation against a semimeasure"),
    "mesh": (cmd_mesh, "common refinement of two equal-sum series"),
    "covermeasure": (cmd_covermeasure, "semimeasure from the terms a small cover catches"),
    "gap-experiment": (cmd_gap_experiment, "tabulate BP'(m) - BP(m) across machines"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--fuel", type=int, default=None, help=f"enumeration budget (default ${FUEL_ENV} or {FALLBACK_FUEL})")
    common.add_argument("--format", choices=FORMATS, default="json")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="semireal", description="Lower semicomputable reals at desk scale.")
    parser.add_argument("--version", action="version", version=f"semireal {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", parents=[common], help=COMMANDS["eval"][1])
    p.add_argument("--real", action="append", required=True)
    p.add_argument("--weights-list", dest="weights_list")

    p = sub.add_parser("reduce", parents=[common], help=COMMANDS["reduce"][1])
    p.add_argument("--alpha", required=True)
    p.add_argument("--beta", required=True)
    p.add_argument("--c", type=int, default=1)
    p.add_argument("--split", action="store_true")
    p.add_argument("--difference", action="store_true")

    p = sub.add_parser("race", parents=[common], help=COMMANDS["race"][1])
    p.add_argument("--alpha", required=True)
    p.add_argument("--beta", required=True)
    p.add_argument("--levels", type=int, default=1)

    p = sub.add_parser("cover-transform", parents=[common], help=COMMANDS["cover-transform"][1])
    p.add_argument("--cover", required=True)
    p.add_argument("--alpha", required=True)
    p.add_argument("--rho")

    p = sub.add_parser("union-bound", parents=[common], help=COMMANDS["union-bound"][1])
    p.add_argument("--cover", required=True)
    p.add_argument("--weights", required=True)
    p.add_argument("--c", required=True)

    p = sub.add_parser("game", parents=[common], help=COMMANDS["game"][1])
    p.add_argument("--strategy", choices=("from-cover", "sum", "constant"), default="from-cover")
    p.add_argument("--real", required=True)
    p.add_argument("--cover")
    p.add_argument("--real-b", dest="real_b")
    p.add_argument("--cover-b", dest="cover_b")
    p.add_argument("--epsilon", required=True)
    p.add_argument("--delta")
    p.add_argument("--as-cover", dest="as_cover", action="store_true")

    p = sub.add_parser("paint", parents=[common], help=COMMANDS["paint"][1])
    p.add_argument("--real", required=True)
    p.add_argument("--paint")
    p.add_argument("--machine")
    p.add_argument("--epsilon")
    p.add_argument("--no-doubling", dest="no_doubling", action="store_true")
    p.add_argument("--out")

    p = sub.add_parser("wset", parents=[common], help=COMMANDS["wset"][1])
    p.add_argument("--real", required=True)
    p.add_argument("--epsilon")
    p.add_argument("--indices")
    p.add_argument("--from-index", dest="from_index", type=int)
    p.add_argument("--cover")
    p.add_argument("--doubling", action="store_true")

    p = sub.add_parser("machine", parents=[common], help=COMMANDS["machine"][1])
    p.add_argument("action", choices=MACHINE_ACTIONS)
    p.add_argument("--machine", default="default")
    p.add_argument("--m", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--c", type=int, default=0)

    p = sub.add_parser("solovay-fn", parents=[common], help=COMMANDS["solovay-fn"][1])
    p.add_argument("--rows")
    p.add_argument("--machine")
    p.add_argument("--n-rows", dest="n_rows", type=int)

    p = sub.add_parser("solovay-ratio", parents=[common], help=COMMANDS["solovay-ratio"][1])
    p.add_argument("--real", required=True)
    p.add_argument("--machine", default="default")
    p.add_argument("--n-terms", dest="n_terms", type=int)

    p = sub.add_parser("regroup", parents=[common], help=COMMANDS["regroup"][1])
    p.add_argument("--double", required=True)

    p = sub.add_parser("mtilde", parents=[common], help=COMMANDS["mtilde"][1])
    p.add_argument("--double", required=True)
    p.add_argument("--m-weights", dest="m_weights", required=True)
    p.add_argument("--c")
    p.add_argument("--levels", type=int)

    p = sub.add_parser("mesh", parents=[common], help=COMMANDS["mesh"][1])
    p.add_argument("--a", required=True)
    p.add_argument("--b")
    p.add_argument("--sum")
    p.add_argument("--n-terms", dest="n_terms", type=int)
    p.add_argument("--split", action="store_true")

    p = sub.add_parser("covermeasure", parents=[common], help=COMMANDS["covermeasure"][1])
    p.add_argument("--real", required=True)
    p.add_argument("--cover", required=True)
    p.add_argument("--n", type=int, default=1)

    p = sub.add_parser("gap-experiment", parents=[common], help=COMMANDS["gap-experiment"][1])
    p.add_argument("--machine", action="append")
    p.add_argument("--real")
    p.add_argument("--m-max", dest="m_max", type=int)
    return parser


def render(cfg: RunConfig, artifact: Artifact) -> str:
    if cfg.output_format == "csv" and artifact.frame is not None:
        return artifact.frame.to_csv(index=False)
    if cfg.output_format == "plain" and artifact.plain is not None:
        return "\n".join(artifact.plain) + "\n"
    return dumps(make_document(cfg.command, artifact.payload)) + "\n"


def dispatch(cfg: RunConfig, io: Optional[SRDataProcessor] = None) -> Tuple[int, str]:
    """
    Run one command.

    Returns:
        (exit status, text): the rendered artifact on success, the error message otherwise.
    """
    io = io or SRDataProcessor()
    handler, _ = COMMANDS[cfg.command]
    try:
        artifact = handler(cfg, io)
        return 0, render(cfg, artifact)
    except (UsageError, FileNotFoundError) as exc:
        return 2, f"semireal {cfg.command}: {exc}"
    except (SemirealError, ValueError, jsonschema.ValidationError) as exc:
        return 1, f"semireal {cfg.command}: {type(exc).__name__}: {exc}"


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.verbose:
        logging.basicConfig(level=logging.DEBUG, stream=sys.stderr, format="%(name)s: %(message)s")
    try:
        cfg = RunConfig.from_args(args)
    except UsageError as exc:
        print(f"semireal {args.command}: {exc}", file=sys.stderr)
        return 2
    status, text = dispatch(cfg)
    if status == 0:
        sys.stdout.write(text)
    else:
        print(text, file=sys.stderr)
    return status


if __name__ == "__main__":
    raise SystemExit(main())
