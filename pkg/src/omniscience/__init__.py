"""Minimum sum-rate and optimal rates for communication for omniscience."""

from .core import (
    GroundSet,
    LinearOrdering,
    Partition,
    RateVector,
    merge_blocks,
    refines,
    subset_sum,
)
from .oracle import (
    EntropyOracle,
    EntropyTable,
    PacketInstance,
    conditional_entropy,
    entropy,
    load_instance,
    parse_instance,
    validate_polymatroid,
)
from .setfunc import (
    DilworthResult,
    dilworth_bruteforce,
    dual_value,
    min_sum_rate_bruteforce,
    partition_value,
)
from .sfm import FusedGround, SfmStats, minimize_fused, minimize_unfused
from .solver import (
    NonAsymptoticSolution,
    OmniscienceSolution,
    TruncationSolveResult,
    check_rates,
    coord_sat_cap,
    mda,
    min_weighted_sum_rate,
    ordering_for_weights,
    solve_non_asymptotic,
)

__all__ = [
    "GroundSet", "LinearOrdering", "Partition", "RateVector", "merge_blocks", "refines", "subset_sum",
    "EntropyOracle", "EntropyTable", "PacketInstance", "conditional_entropy", "entropy",
    "load_instance", "parse_instance", "validate_polymatroid",
    "DilworthResult", "dilworth_bruteforce", "dual_value", "min_sum_rate_bruteforce", "partition_value",
    "FusedGround", "SfmStats", "minimize_fused", "minimize_unfused",
    "NonAsymptoticSolution", "OmniscienceSolution", "TruncationSolveResult", "check_rates",
    "coord_sat_cap", "mda", "min_weighted_sum_rate", "ordering_for_weights", "solve_non_asymptotic",
]
