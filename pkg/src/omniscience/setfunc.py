"""The alpha-parameterized dual set function and brute-force partition oracles.

For a sum-rate estimate ``alpha`` the primal function is
``F(X) = H(X | V-X)`` for proper subsets and ``F(V) = alpha``; its dual is
``F#(X) = alpha - F(V-X)``, which for nonempty proper ``X`` reduces to
``alpha - H(V) + H(X)``.

The brute-force routines enumerate every set partition and are meant as
test oracles for the polynomial algorithm in :mod:`omniscience.solver`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from .core import Partition, Subset, ceil_rational, refines
from .oracle import EntropyOracle

MAX_BRUTEFORCE_USERS = 10


class TooLargeError(ValueError):
    """Ground set exceeds an enumeration cap."""


class InternalError(RuntimeError):
    """A guarantee of the theory failed to hold; indicates a bug or a bad oracle."""


@dataclass(frozen=True)
class DilworthResult:
    value: Fraction
    minimizer: Partition


def primal_value(o: EntropyOracle, alpha: Fraction, x: Subset) -> Fraction:
    if x == o.full:
        return Fraction(alpha)
    return o.conditional(x, o.full & ~x)


def dual_value(o: EntropyOracle, alpha: Fraction, x: Subset) -> Fraction:
    if x == 0:
        return Fraction(0)
    if x == o.full:
        return Fraction(alpha)
    return alpha - o.entropy(o.full) + o.entropy(x)


def dual_value_definitional(o: EntropyOracle, alpha: Fraction, x: Subset) -> Fraction:
    return alpha - primal_value(o, alpha, o.full & ~x)


def partition_value(o: EntropyOracle, alpha: Fraction, p: Partition) -> Fraction:
    return sum((dual_value(o, alpha, b) for b in p.blocks), Fraction(0))


def sum_rate_estimate(o: EntropyOracle, p: Partition) -> Fraction:
    """sum over blocks of (H(V) - H(X)) / (|P| - 1); needs at least two blocks."""
    if len(p) < 2:
        raise ValueError("estimate is undefined for the one-block partition")
    hv = o.entropy(o.full)
    return sum((hv - o.entropy(b) for b in p.blocks), Fraction(0)) / (len(p) - 1)


def restricted_growth_strings(n: int) -> Iterator[list[int]]:
    """Yield every restricted growth string of length n (one per set partition)."""
    if n == 0:
        yield []
        return
    a = [0] * n

    def rec(i, top):
        # top = max(a[:i]); position i may open at most one new block
        if i == n:
            yield list(a)
            return
        for v in range(top + 2):
            a[i] = v
            yield from rec(i + 1, max(top, v))

    yield from rec(1, 0)


def enumerate_partitions(ground: Subset) -> Iterator[Partition]:
    """Every partition of the users in ``ground``."""
    users = [i for i in range(ground.bit_length()) if ground >> i & 1]
    for rgs in restricted_growth_strings(len(users)):
        blocks = [0] * (max(rgs) + 1 if rgs else 0)
        for u, label in zip(users, rgs):
            blocks[label] |= 1 << u
        yield Partition(blocks)


def finest(partitions: list[Partition]) -> Partition:
    """The member of ``partitions`` that refines all others."""
    for p in sorted(partitions, key=len, reverse=True):
        if all(refines(p, q) for q in partitions):
            return p
    raise InternalError("no finest optimizer among %d optimal partitions" % len(partitions))


def _check_size(o: EntropyOracle) -> None:
    if o.n > MAX_BRUTEFORCE_USERS:
        raise TooLargeError(f"brute force limited to {MAX_BRUTEFORCE_USERS} users, got {o.n}")


def dilworth_bruteforce(o: EntropyOracle, alpha) -> DilworthResult:
    """min over all partitions P of V of F#[P], with the finest minimizer."""
    _check_size(o)
    alpha = Fraction(alpha)
    best = None
    argmins: list[Partition] = []
    for p in enumerate_partitions(o.full):
        v = partition_value(o, alpha, p)
        if best is None or v < best:
            best, argmins = v, [p]
        elif v == best:
            argmins.append(p)
    return DilworthResult(best, finest(argmins))


def min_sum_rate_bruteforce(o: EntropyOracle) -> tuple[Fraction, Partition]:
    """Minimum sum-rate as a max over partitions with >= 2 blocks, plus the finest maximizer."""
    _check_size(o)
    best = None
    argmaxes: list[Partition] = []
    for p in enumerate_partitions(o.full):
        if len(p) < 2:
            continue
        v = sum_rate_estimate(o, p)
        if best is None or v > best:
            best, argmaxes = v, [p]
        elif v == best:
            argmaxes.append(p)
    return best, finest(argmaxes)


def min_integral_sum_rate(o: EntropyOracle) -> int:
    """The non-asymptotic minimum sum-rate: the exact ceiling of the asymptotic one."""
    return ceil_rational(min_sum_rate_bruteforce(o)[0])
