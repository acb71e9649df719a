"""Constrained minimization of F#(X) - r(X) for the saturation-capacity step.

Both variants fix one user ``forced`` inside X.  The fused variant chooses a
union of blocks of the current partition; the unfused variant chooses any
subset of the already-processed users.  Either way the free part is a family
of ``k`` atoms and the objective is minimized over all ``2**k`` choices by a
:class:`MinimizerEngine`.  Only brute-force enumeration is provided; a
polynomial engine can be passed in through the same interface.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Protocol, Sequence

from .core import RateVector, Subset, subset_sum
from .oracle import EntropyOracle
from .setfunc import InternalError, TooLargeError, dual_value

MAX_FREE_ATOMS = 20


@dataclass
class SfmStats:
    """Counters over all SFM calls of a solve.

    ``summed_ground_size`` adds up the number of free atoms per call, the
    "size of SFM" plotted against the number of users.
    """

    calls: int = 0
    summed_ground_size: int = 0
    evaluations: int = 0

    def record(self, ground_size: int, evaluations: int) -> None:
        self.calls += 1
        self.summed_ground_size += ground_size
        self.evaluations += evaluations

    def merge(self, other: "SfmStats") -> None:
        self.calls += other.calls
        self.summed_ground_size += other.summed_ground_size
        self.evaluations += other.evaluations


@dataclass(frozen=True)
class FusedGround:
    blocks: tuple[Subset, ...]
    forced: int

    def __post_init__(self):
        seen = 0
        for b in self.blocks:
            if b <= 0 or b & seen:
                raise ValueError("fused blocks must be nonempty and disjoint")
            seen |= b
        if seen >> self.forced & 1:
            raise ValueError("forced user lies inside a fused block")


class MinimizerEngine(Protocol):
    def __call__(self, k: int, objective: Callable[[int], Fraction]) -> tuple[Fraction, int, int]:
        """Minimize ``objective`` over codes ``0..2**k-1`` (bit j = atom j chosen).

        Returns (minimum, minimal minimizer code, number of evaluations).
        """


def brute_force_engine(k: int, objective: Callable[[int], Fraction]) -> tuple[Fraction, int, int]:
    if k > MAX_FREE_ATOMS:
        raise TooLargeError(f"enumeration capped at {MAX_FREE_ATOMS} free atoms, got {k}")
    best = objective(0)
    meet = 0
    for code in range(1, 1 << k):
        v = objective(code)
        if v < best:
            best, meet = v, code
        elif v == best:
            meet &= code
    # minimizers form a lattice, so their meet is itself a minimizer
    if objective(meet) != best:
        raise InternalError("intersection of minimizers is not a minimizer; objective is not submodular")
    return best, meet, (1 << k) + 1


def _decode(code: int, atoms: Sequence[Subset]) -> Subset:
    mask = 0
    j = 0
    while code:
        if code & 1:
            mask |= atoms[j]
        code >>= 1
        j += 1
    return mask


def _saturation_objective(o: EntropyOracle, alpha: Fraction, rv: RateVector, forced: int,
                          atoms: Sequence[Subset]) -> Callable[[int], Fraction]:
    base = 1 << forced

    def g(code: int) -> Fraction:
        x = base | _decode(code, atoms)
        return dual_value(o, alpha, x) - subset_sum(rv, x)

    return g


def minimize_fused(o: EntropyOracle, alpha, rv: RateVector, ground: FusedGround,
                   stats: SfmStats | None = None,
                   engine: MinimizerEngine = brute_force_engine) -> tuple[Fraction, tuple[Subset, ...]]:
    """Saturation capacity over unions of fused blocks.

    Returns the minimum and the blocks of the minimal minimizer; the forced
    user is implied and not part of the returned blocks.
    """
    alpha = Fraction(alpha)
    atoms = ground.blocks
    g = _saturation_objective(o, alpha, rv, ground.forced, atoms)
    value, code, evals = engine(len(atoms), g)
    if stats is not None:
        stats.record(len(atoms), evals)
    return value, tuple(atoms[j] for j in range(len(atoms)) if code >> j & 1)


def minimize_unfused(o: EntropyOracle, alpha, rv: RateVector, processed: Subset, forced: int,
                     stats: SfmStats | None = None,
                     engine: MinimizerEngine = brute_force_engine) -> tuple[Fraction, Subset]:
    """Saturation capacity over forced in X, X within processed + forced.

    Returns the minimum and the minimal minimizer X (forced user included).
    """
    if processed >> forced & 1:
        raise ValueError("forced user already processed")
    alpha = Fraction(alpha)
    atoms = [1 << i for i in range(processed.bit_length()) if processed >> i & 1]
    g = _saturation_objective(o, alpha, rv, forced, atoms)
    value, code, evals = engine(len(atoms), g)
    if stats is not None:
        stats.record(len(atoms), evals)
    return value, (1 << forced) | _decode(code, atoms)
