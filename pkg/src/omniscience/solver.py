"""Minimum sum-rate solver.

:func:`coord_sat_cap` raises one rate coordinate at a time by its saturation
capacity, starting from ``(alpha - H(V))`` in every coordinate, and builds
the finest minimizing partition of the Dilworth truncation as it goes.
:func:`mda` drives the sum-rate estimate upward from the singleton partition,
re-estimating from the partition returned at each step until the partition
repeats.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Literal, Sequence

from .core import (
    LinearOrdering,
    Partition,
    RateVector,
    Subset,
    ceil_rational,
    members,
    merge_blocks,
    subset_sum,
    to_rational,
)
from .oracle import EntropyOracle
from .setfunc import InternalError, dual_value, sum_rate_estimate
from .sfm import FusedGround, MinimizerEngine, SfmStats, brute_force_engine, minimize_fused, minimize_unfused

log = logging.getLogger(__name__)

Variant = Literal["fused", "unfused"]
Mode = Literal["asymptotic", "non-asymptotic"]


class NotIntegralError(ValueError):
    """Non-asymptotic solve requested on an oracle with fractional values."""


@dataclass(frozen=True)
class SatCapStep:
    """One coordinate update: the user raised, by how much, and the partition after."""

    user: int
    capacity: Fraction
    minimizer: Subset  # minimal minimizer, raised user included
    partition: Partition


@dataclass(frozen=True)
class TruncationSolveResult:
    rv: RateVector
    minimizer: Partition
    stats: SfmStats
    steps: tuple[SatCapStep, ...] = ()


@dataclass(frozen=True)
class OmniscienceSolution:
    min_sum_rate: Fraction
    fundamental_partition: Partition
    rv: RateVector
    alpha_trace: tuple[Fraction, ...]
    mmi: Fraction
    stats: SfmStats = field(compare=False)


@dataclass(frozen=True)
class NonAsymptoticSolution:
    min_sum_rate: int
    rv: RateVector
    minimizer: Partition
    asymptotic: OmniscienceSolution


def _ordering(o: EntropyOracle, phi) -> LinearOrdering:
    if phi is None:
        return LinearOrdering.identity(o.n)
    if not isinstance(phi, LinearOrdering):
        phi = LinearOrdering(phi)
    if len(phi) != o.n:
        raise ValueError(f"ordering has {len(phi)} entries for {o.n} users")
    return phi


def coord_sat_cap(o: EntropyOracle, alpha, phi=None, variant: Variant = "fused",
                  stats: SfmStats | None = None,
                  engine: MinimizerEngine = brute_force_engine) -> TruncationSolveResult:
    """Greedy saturation of the dual polyhedron at sum-rate estimate ``alpha``.

    Returns a rate vector in the base polyhedron of the Dilworth truncation
    and the finest minimizing partition.  When ``alpha`` is below the minimum
    sum-rate the returned vector sums to strictly less than ``alpha``.
    """
    alpha = to_rational(alpha)
    phi = _ordering(o, phi)
    if stats is None:
        stats = SfmStats()
    n = o.n
    first = phi[0]
    rv = RateVector.constant(n, alpha - o.entropy(o.full))
    rv = rv.add(first, dual_value(o, alpha, 1 << first) - rv[first])
    part = Partition([1 << first])
    steps = []
    for user in phi.phi[1:]:
        if variant == "fused":
            xi, chosen = minimize_fused(o, alpha, rv, FusedGround(part.blocks, user), stats, engine)
            merged = list(chosen)
            x_hat = (1 << user) | sum(chosen)
        elif variant == "unfused":
            xi, x_hat = minimize_unfused(o, alpha, rv, part.ground, user, stats, engine)
            merged = [b for b in part.blocks if b & x_hat]
        else:
            raise ValueError(f"unknown variant {variant!r}")
        rv = rv.add(user, xi)
        part = Partition(part.blocks + (1 << user,))
        part = merge_blocks(part, merged + [1 << user])
        steps.append(SatCapStep(user, xi, x_hat, part))
    return TruncationSolveResult(rv, part, stats, tuple(steps))


def mda(o: EntropyOracle, phi=None, variant: Variant = "fused",
        engine: MinimizerEngine = brute_force_engine) -> OmniscienceSolution:
    """Minimum sum-rate, fundamental partition and an optimal rate vector."""
    phi = _ordering(o, phi)
    stats = SfmStats()
    part = Partition.singletons(o.n)
    trace = []
    for _ in range(o.n):
        alpha = sum_rate_estimate(o, part)
        trace.append(alpha)
        res = coord_sat_cap(o, alpha, phi, variant, stats, engine)
        log.debug("alpha=%s partition=%s", alpha, res.minimizer)
        if res.minimizer == part:
            return OmniscienceSolution(alpha, part, res.rv, tuple(trace),
                                       o.entropy(o.full) - alpha, stats)
        if len(res.minimizer) < 2 or len(res.minimizer) >= len(part):
            raise InternalError(f"partition {res.minimizer} does not strictly coarsen {part}")
        part = res.minimizer
    raise InternalError(f"no fixpoint after {o.n} iterations")


def solve_non_asymptotic(o: EntropyOracle, phi=None,
                         engine: MinimizerEngine = brute_force_engine) -> NonAsymptoticSolution:
    """Integral minimum sum-rate and an integral optimal rate vector."""
    if not o.is_integral():
        raise NotIntegralError("non-asymptotic solve needs an integer-valued entropy oracle")
    aco = mda(o, phi, engine=engine)
    r_nco = ceil_rational(aco.min_sum_rate)
    res = coord_sat_cap(o, r_nco, phi, "fused", aco.stats, engine)
    if not res.rv.is_integral() or res.rv.total() != r_nco:
        raise InternalError(f"non-asymptotic vector {res.rv} is not an integral base of sum {r_nco}")
    return NonAsymptoticSolution(r_nco, res.rv, res.minimizer, aco)


def ordering_for_weights(weights: Sequence) -> LinearOrdering:
    """Users by ascending weight; equal weights keep ascending index order."""
    w = [to_rational(x) for x in weights]
    if any(x < 0 for x in w):
        raise ValueError("weights must be nonnegative")
    return LinearOrdering(sorted(range(len(w)), key=lambda i: (w[i], i)))


def min_weighted_sum_rate(o: EntropyOracle, weights: Sequence, mode: Mode = "asymptotic") -> RateVector:
    """Optimal rate vector of least weighted sum among all optimal vectors."""
    if len(weights) != o.n:
        raise ValueError(f"{len(weights)} weights for {o.n} users")
    phi = ordering_for_weights(weights)
    if mode == "asymptotic":
        return mda(o, phi).rv
    if mode == "non-asymptotic":
        return solve_non_asymptotic(o, phi).rv
    raise ValueError(f"unknown mode {mode!r}")


# -- feasibility ---------------------------------------------------------------

@dataclass(frozen=True)
class RateViolation:
    subset: Subset | None  # None: the sum condition failed
    required: Fraction
    actual: Fraction

    def describe(self, o: EntropyOracle | None = None) -> str:
        if self.subset is None:
            return f"sum-rate {self.actual} differs from {self.required}"
        names = [o.ground.label(i) if o else str(i + 1) for i in members(self.subset)]
        return (f"r({{{','.join(names)}}}) = {self.actual} < {self.required} "
                f"= H(X|V-X)")


def check_rates(o: EntropyOracle, rv: RateVector, alpha=None) -> RateViolation | None:
    """First violated Slepian-Wolf constraint r(X) >= H(X|V-X), or None.

    Subsets are scanned in increasing mask order.  With ``alpha`` given, the
    sum condition r(V) = alpha is checked after all subset constraints.
    """
    if len(rv) != o.n:
        raise ValueError(f"rate vector has {len(rv)} entries for {o.n} users")
    full = o.full
    for x in range(1, full):
        need = o.conditional(x, full & ~x)
        got = subset_sum(rv, x)
        if got < need:
            return RateViolation(x, need, got)
    if alpha is not None:
        alpha = to_rational(alpha)
        if rv.total() != alpha:
            return RateViolation(None, alpha, rv.total())
    return None


def in_dual_polyhedron(o: EntropyOracle, alpha, rv: RateVector) -> bool:
    """r(X) <= F#(X) for every X."""
    alpha = to_rational(alpha)
    return all(subset_sum(rv, x) <= dual_value(o, alpha, x) for x in range(1 << o.n))
