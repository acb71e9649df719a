"""Ground-set vocabulary: bitmask subsets, exact rationals, partitions, rate
vectors and linear orderings.

Users are indexed ``0..n-1`` internally.  A subset of users is a plain ``int``
bitmask (bit ``i`` set means user ``i`` is a member), so every set operation
is a single integer operation.  Rationals are :class:`fractions.Fraction`;
Python integers are unbounded, so arithmetic never wraps.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

Rational = Fraction
Subset = int

MAX_USERS = 64


class GroundSetError(ValueError):
    """Raised when objects over different or invalid ground sets are mixed."""


def to_rational(value) -> Fraction:
    """Parse ``"p/q"``, ``"k"``, an int or a Fraction into an exact rational.

    Floats are rejected: a float has already lost the exact value.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot convert {type(value).__name__} to an exact rational")


def format_rational(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def ceil_rational(q: Fraction) -> int:
    return -((-q.numerator) // q.denominator)


# -- subsets -----------------------------------------------------------------

def full_mask(n: int) -> Subset:
    return (1 << n) - 1


def singleton(i: int) -> Subset:
    return 1 << i


def mask_of(members: Iterable[int]) -> Subset:
    mask = 0
    for i in members:
        if i < 0:
            raise GroundSetError(f"negative user index {i}")
        mask |= 1 << i
    return mask


def members(mask: Subset) -> list[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def popcount(mask: Subset) -> int:
    return bin(mask).count("1")


def lowest(mask: Subset) -> int:
    """Index of the smallest member; ``mask`` must be nonempty."""
    return (mask & -mask).bit_length() - 1


def submasks(mask: Subset) -> Iterator[Subset]:
    """All subsets of ``mask`` in increasing numeric order, empty set first."""
    bits = members(mask)
    for code in range(1 << len(bits)):
        sub = 0
        for k, b in enumerate(bits):
            if code >> k & 1:
                sub |= 1 << b
        yield sub


@dataclass(frozen=True)
class GroundSet:
    n: int
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        if not 2 <= self.n <= MAX_USERS:
            raise GroundSetError(f"ground set size must be in [2, {MAX_USERS}], got {self.n}")
        if self.labels is not None and len(self.labels) != self.n:
            raise GroundSetError("one label per user required")

    @property
    def full(self) -> Subset:
        return full_mask(self.n)

    def label(self, i: int) -> str:
        return self.labels[i] if self.labels else str(i + 1)

    def contains(self, mask: Subset) -> bool:
        return mask >= 0 and mask & ~self.full == 0


# -- partitions ----------------------------------------------------------------

@dataclass(frozen=True)
class Partition:
    """Disjoint nonempty blocks, stored in canonical order (by smallest member).

    The ground of a partition is the union of its blocks.  Partitions of a
    proper subset of the users appear while the saturation-capacity sweep
    is still in progress.
    """

    blocks: tuple[Subset, ...]

    def __init__(self, blocks: Iterable[Subset]):
        blocks = tuple(blocks)
        seen = 0
        for b in blocks:
            if b <= 0:
                raise GroundSetError("partition blocks must be nonempty")
            if b & seen:
                raise GroundSetError("partition blocks overlap")
            seen |= b
        object.__setattr__(self, "blocks", tuple(sorted(blocks, key=lowest)))

    @classmethod
    def singletons(cls, n_or_mask: int, *, mask: bool = False) -> "Partition":
        m = n_or_mask if mask else full_mask(n_or_mask)
        return cls(singleton(i) for i in members(m))

    @classmethod
    def whole(cls, n: int) -> "Partition":
        return cls([full_mask(n)])

    @classmethod
    def from_lists(cls, lists: Iterable[Iterable[int]]) -> "Partition":
        return cls(mask_of(b) for b in lists)

    @property
    def ground(self) -> Subset:
        g = 0
        for b in self.blocks:
            g |= b
        return g

    def __len__(self) -> int:
        return len(self.blocks)

    def __iter__(self) -> Iterator[Subset]:
        return iter(self.blocks)

    def as_lists(self) -> list[list[int]]:
        return [members(b) for b in self.blocks]

    def block_of(self, i: int) -> Subset:
        for b in self.blocks:
            if b >> i & 1:
                return b
        raise GroundSetError(f"user {i} not covered by partition")

    def format(self, ground: GroundSet | None = None) -> str:
        def name(i):
            return ground.label(i) if ground else str(i + 1)
        return "{" + ", ".join("{" + ",".join(name(i) for i in members(b)) + "}" for b in self.blocks) + "}"

    def __str__(self) -> str:
        return self.format()


def refines(p: Partition, q: Partition) -> bool:
    """True iff every block of ``p`` sits inside some block of ``q``."""
    if p.ground != q.ground:
        raise GroundSetError("partitions are over different ground sets")
    return all(any(b & ~c == 0 for c in q.blocks) for b in p.blocks)


def merge_blocks(p: Partition, to_merge: Iterable[Subset]) -> Partition:
    """Replace the blocks in ``to_merge`` by their union."""
    to_merge = set(to_merge)
    if not to_merge:
        raise GroundSetError("nothing to merge")
    existing = set(p.blocks)
    stray = to_merge - existing
    if stray:
        raise GroundSetError(f"not blocks of the partition: {sorted(stray)}")
    union = 0
    for b in to_merge:
        union |= b
    return Partition([b for b in p.blocks if b not in to_merge] + [union])


# -- rate vectors and orderings ---------------------------------------------------

@dataclass(frozen=True)
class RateVector:
    rates: tuple[Fraction, ...]

    def __init__(self, rates: Iterable):
        object.__setattr__(self, "rates", tuple(to_rational(r) for r in rates))

    @classmethod
    def constant(cls, n: int, value) -> "RateVector":
        return cls([value] * n)

    def __len__(self) -> int:
        return len(self.rates)

    def __getitem__(self, i: int) -> Fraction:
        return self.rates[i]

    def __iter__(self) -> Iterator[Fraction]:
        return iter(self.rates)

    def add(self, i: int, delta) -> "RateVector":
        rates = list(self.rates)
        rates[i] += delta
        return RateVector(rates)

    def total(self) -> Fraction:
        return sum(self.rates, Fraction(0))

    def dot(self, weights: Sequence) -> Fraction:
        if len(weights) != len(self.rates):
            raise GroundSetError("weight vector length differs from rate vector")
        return sum((to_rational(w) * r for w, r in zip(weights, self.rates)), Fraction(0))

    def is_integral(self) -> bool:
        return all(r.denominator == 1 for r in self.rates)

    def format(self) -> str:
        return "(" + ", ".join(format_rational(r) for r in self.rates) + ")"

    def __str__(self) -> str:
        return self.format()


def subset_sum(rv: RateVector, mask: Subset) -> Fraction:
    """r(X): exact sum of the rates of the members of ``mask``."""
    if mask >> len(rv.rates):
        raise GroundSetError("subset reaches outside the rate vector")
    total = Fraction(0)
    for i in members(mask):
        total += rv.rates[i]
    return total


@dataclass(frozen=True)
class LinearOrdering:
    phi: tuple[int, ...] = field()

    def __init__(self, phi: Iterable[int]):
        phi = tuple(phi)
        if sorted(phi) != list(range(len(phi))):
            raise GroundSetError(f"not a permutation of 0..{len(phi) - 1}: {phi}")
        object.__setattr__(self, "phi", phi)

    @classmethod
    def identity(cls, n: int) -> "LinearOrdering":
        return cls(range(n))

    @classmethod
    def from_one_based(cls, phi: Iterable[int]) -> "LinearOrdering":
        return cls(i - 1 for i in phi)

    def __len__(self) -> int:
        return len(self.phi)

    def __iter__(self) -> Iterator[int]:
        return iter(self.phi)

    def __getitem__(self, k: int) -> int:
        return self.phi[k]
