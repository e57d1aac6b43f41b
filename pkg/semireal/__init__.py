"""
Lower semicomputable reals: presentations, Solovay reductions, covers,
prediction games and finite prefix-free machines, all in exact rationals.
"""
from __future__ import annotations
from .SRExceptions import (
    SemirealError,
    PendingError,
    NonIncreasingError,
    NegativeTermError,
    InvariantBroken,
    LengthBudgetExceeded,
    StrategyOverspent,
    WeightOverflow,
    DominationViolated,
    DensityViolated,
    RedundancyLoopGuard,
    PrefixFreeViolation,
    KraftViolation,
    LimitInconsistent,
    RowNotFinite,
    SumMismatch,
    FileFormatError,
)
from .SRReal import (
    LscReal, Verdict, Fuel, seq_from_series, series_from_seq, leftcut, monotone_hull,
    lsc_sum, scale, dovetail, format_q, parse_q, pow2
)
from .SRCover import Interval, Cover, total_length, contains, transform_cover, union_bound, u_c_cover
from .SRReduction import (
    ReductionWitness, witness_from_sum, identity_witness, witness_against_scale, compose_witnesses,
    diff_to_lsc, dominated_witness, split_along, weighted_complete, omega_with_sum
)
from .SRRace import RaceOutcome, race, race_family
from .SRGame import (
    GameTrace, Prediction, Strategy, ConstantStrategy, CoverStrategy, SumStrategy,
    play, strategy_from_cover, cover_from_strategy, sum_strategy, shifted_prediction_family,
    wset_check, wset_from_cover, wset_intersection
)
from .SRPainter import PaintResult, painter
from .SRMachine import (
    Entry, Machine, Semimeasure, load_machine, apriori, kp, omega, omega_real, bp, bp_prime,
    busy_time, modulus, modulus_lower_bound, solovay_ratio, prefix_chain_machine,
    self_timing_machine, self_timing_family, measured_constant
)
from .SRSolovayTable import SolovayTable, build_solovay_table
from .SRTransforms import (
    DoubleSeries, MeshRefinement, Allocation, regroup, allocate_mtilde, combine_allocations,
    mesh_refine, split_nonincreasing, cover_to_semimeasure
)
from .SRDataProcessor import SRDataProcessor
from .algo import gap_experiment, modulus_profile, ratio_painter_run, surrogate_painter_run

__all__ = [
    "SemirealError",
    "PendingError",
    "NonIncreasingError",
    "NegativeTermError",
    "InvariantBroken",
    "LengthBudgetExceeded",
    "StrategyOverspent",
    "WeightOverflow",
    "DominationViolated",
    "DensityViolated",
    "RedundancyLoopGuard",
    "PrefixFreeViolation",
    "KraftViolation",
    "LimitInconsistent",
    "RowNotFinite",
    "SumMismatch",
    "FileFormatError",
    "LscReal",
    "Verdict",
    "Fuel",
    "seq_from_series",
    "series_from_seq",
    "leftcut",
    "monotone_hull",
    "lsc_sum",
    "scale",
    "dovetail",
    "format_q",
    "parse_q",
    "pow2",
    "Interval",
    "Cover",
    "total_length",
    "contains",
    "transform_cover",
    "union_bound",
    "u_c_cover",
    "ReductionWitness",
    "witness_from_sum",
    "identity_witness",
    "witness_against_scale",
    "compose_witnesses",
    "diff_to_lsc",
    "dominated_witness",
    "split_along",
    "weighted_complete",
    "omega_with_sum",
    "RaceOutcome",
    "race",
    "race_family",
    "GameTrace",
    "Prediction",
    "Strategy",
    "ConstantStrategy",
    "CoverStrategy",
    "SumStrategy",
    "play",
    "strategy_from_cover",
    "cover_from_strategy",
    "sum_strategy",
    "shifted_prediction_family",
    "wset_check",
    "wset_from_cover",
    "wset_intersection",
    "PaintResult",
    "painter",
    "Entry",
    "Machine",
    "Semimeasure",
    "load_machine",
    "apriori",
    "kp",
    "omega",
    "omega_real",
    "bp",
    "bp_prime",
    "busy_time",
    "modulus",
    "modulus_lower_bound",
    "solovay_ratio",
    "prefix_chain_machine",
    "self_timing_machine",
    "self_timing_family",
    "measured_constant",
    "SolovayTable",
    "build_solovay_table",
    "DoubleSeries",
    "MeshRefinement",
    "Allocation",
    "regroup",
    "allocate_mtilde",
    "combine_allocations",
    "mesh_refine",
    "split_nonincreasing",
    "cover_to_semimeasure",
    "SRDataProcessor",
    "gap_experiment",
    "modulus_profile",
    "ratio_painter_run",
    "surrogate_painter_run",
]

__version__ = "0.1.0"
