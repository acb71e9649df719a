"""Entropy oracles H(X) and the JSON instance format.

Two instance classes are supported: a packet model where ``H(X)`` counts the
distinct packets held by the users in ``X``, and an explicit table with one
rational per subset.
"""

from __future__ import annotations

import json
import threading
from abc import ABC, abstractmethod
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .core import (
    GroundSet,
    GroundSetError,
    Subset,
    format_rational,
    popcount,
    to_rational,
)


class InstanceError(ValueError):
    """Malformed instance file or invalid instance data."""


class PolymatroidError(ValueError):
    """An entropy table violates one of the polymatroid axioms."""

    def __init__(self, violation: "Violation"):
        super().__init__(str(violation))
        self.violation = violation


class EntropyOracle(ABC):
    """Evaluates the entropy set function over bitmask subsets."""

    ground: GroundSet
    #: False when the polymatroid axioms were not checked; solver guarantees
    #: are then conditional on the caller's promise.
    validated: bool = True

    @property
    def n(self) -> int:
        return self.ground.n

    @property
    def full(self) -> Subset:
        return self.ground.full

    @abstractmethod
    def _evaluate(self, mask: Subset) -> Fraction:
        ...

    def entropy(self, mask: Subset) -> Fraction:
        if not self.ground.contains(mask):
            raise GroundSetError(f"subset {mask:#b} outside ground set of {self.n} users")
        return self._evaluate(mask)

    __call__ = entropy

    def conditional(self, x: Subset, y: Subset) -> Fraction:
        """H(X|Y) = H(X u Y) - H(Y)."""
        return self.entropy(x | y) - self.entropy(y)

    def is_integral(self) -> bool:
        return all(self._evaluate(m).denominator == 1 for m in range(1 << self.n))


def entropy(o: EntropyOracle, mask: Subset) -> Fraction:
    return o.entropy(mask)


def conditional_entropy(o: EntropyOracle, x: Subset, y: Subset) -> Fraction:
    return o.conditional(x, y)


class PacketInstance(EntropyOracle):
    """Coded cooperative data exchange: each user holds a set of packets.

    Packets are opaque strings.  Every packet must be held by someone, so
    ``H(V)`` equals the number of packets.
    """

    def __init__(self, holdings: Sequence[Iterable[str]], labels: Sequence[str] | None = None):
        holdings = [frozenset(h) for h in holdings]
        self.ground = GroundSet(len(holdings), tuple(labels) if labels else None)
        universe = sorted(set().union(*holdings))
        if not universe:
            raise InstanceError("packet instance holds no packets")
        index = {p: k for k, p in enumerate(universe)}
        self.holdings = tuple(holdings)
        self.packets = tuple(universe)
        self._user_bits = tuple(sum(1 << index[p] for p in h) for h in holdings)
        # Races on the cache only ever store the same value twice.
        self._cache: dict[Subset, Fraction] = {}
        self._lock = threading.Lock()

    @property
    def m(self) -> int:
        return len(self.packets)

    def _evaluate(self, mask: Subset) -> Fraction:
        hit = self._cache.get(mask)
        if hit is not None:
            return hit
        bits = 0
        i = 0
        m = mask
        while m:
            if m & 1:
                bits |= self._user_bits[i]
            m >>= 1
            i += 1
        value = Fraction(popcount(bits))
        with self._lock:
            self._cache[mask] = value
        return value

    def is_integral(self) -> bool:
        return True

    def to_json(self) -> dict:
        return {"type": "packets", "users": [sorted(h) for h in self.holdings]}

    def __repr__(self) -> str:
        return f"PacketInstance(n={self.n}, m={self.m})"


@dataclass(frozen=True)
class Violation:
    axiom: str  # "normalized" | "monotone" | "submodular"
    x: Subset
    y: Subset

    def __str__(self) -> str:
        return f"{self.axiom} violated at X={self.x:#b}, Y={self.y:#b}"


def validate_polymatroid(values: Sequence[Fraction], n: int) -> Violation | None:
    """Return the first violated polymatroid axiom, or None.

    Uses the local forms, which are equivalent to the global axioms:
    H(X) <= H(X+i) for monotonicity and H(X+i) + H(X+j) >= H(X) + H(X+i+j)
    for submodularity.  The witness pair is (X+i, X) or (X+i, X+j).
    """
    if values[0] != 0:
        return Violation("normalized", 0, 0)
    for x in range(1 << n):
        for i in range(n):
            if not x >> i & 1 and values[x | 1 << i] < values[x]:
                return Violation("monotone", x | 1 << i, x)
    for x in range(1 << n):
        for i in range(n):
            if x >> i & 1:
                continue
            xi = x | 1 << i
            for j in range(i + 1, n):
                if x >> j & 1:
                    continue
                xj = x | 1 << j
                if values[xi] + values[xj] < values[x] + values[xi | xj]:
                    return Violation("submodular", xi, xj)
    return None


class EntropyTable(EntropyOracle):
    """Explicit H(X) for all 2^n subsets, checked to be a polymatroid.

    Pass ``validate=False`` to skip the O(n^2 2^n) axiom check for large n;
    the table is then flagged ``validated = False``.
    """

    def __init__(self, n: int, values: Sequence, *, validate: bool = True,
                 labels: Sequence[str] | None = None):
        self.ground = GroundSet(n, tuple(labels) if labels else None)
        if len(values) != 1 << n:
            raise InstanceError(f"table needs {1 << n} entries, got {len(values)}")
        self.values = tuple(to_rational(v) for v in values)
        self.validated = validate
        if validate:
            violation = validate_polymatroid(self.values, n)
            if violation is not None:
                raise PolymatroidError(violation)

    @classmethod
    def from_oracle(cls, o: EntropyOracle, *, validate: bool = True) -> "EntropyTable":
        return cls(o.n, [o.entropy(m) for m in range(1 << o.n)], validate=validate)

    @classmethod
    def from_dict(cls, n: int, values: dict[Subset, object], **kw) -> "EntropyTable":
        table = [Fraction(0)] * (1 << n)
        for mask, v in values.items():
            table[mask] = to_rational(v)
        return cls(n, table, **kw)

    def _evaluate(self, mask: Subset) -> Fraction:
        return self.values[mask]

    def is_integral(self) -> bool:
        return all(v.denominator == 1 for v in self.values)

    def to_json(self) -> dict:
        return {
            "type": "table",
            "n": self.n,
            "values": [[str(m), format_rational(v)] for m, v in enumerate(self.values)],
        }

    def __repr__(self) -> str:
        return f"EntropyTable(n={self.n})"


# -- instance files -------------------------------------------------------------

def parse_instance(text: str, *, validate: bool = True) -> EntropyOracle:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        line = text.splitlines()[exc.lineno - 1] if text.splitlines() else ""
        raise InstanceError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}: {line.strip()!r}") from None
    return instance_from_json(doc, validate=validate)


def instance_from_json(doc, *, validate: bool = True) -> EntropyOracle:
    if not isinstance(doc, dict) or "type" not in doc:
        raise InstanceError('instance must be an object with a "type" field')
    kind = doc["type"]
    labels = doc.get("labels")
    try:
        if kind == "packets":
            users = doc.get("users")
            if not isinstance(users, list) or not all(isinstance(u, list) for u in users):
                raise InstanceError('"users" must be a list of packet lists')
            return PacketInstance([[str(p) for p in u] for u in users], labels=labels)
        if kind == "table":
            n = doc.get("n")
            if not isinstance(n, int):
                raise InstanceError('"n" must be an integer')
            entries = {}
            for k, entry in enumerate(doc.get("values", [])):
                if not isinstance(entry, list) or len(entry) != 2:
                    raise InstanceError(f"values[{k}] must be a [mask, value] pair")
                mask = int(entry[0])
                if not 0 <= mask < 1 << n:
                    raise InstanceError(f"values[{k}]: mask {mask} outside {n} users")
                if mask in entries:
                    raise InstanceError(f"values[{k}]: duplicate mask {mask}")
                entries[mask] = to_rational(entry[1])
            missing = [m for m in range(1, 1 << n) if m not in entries]
            if missing:
                raise InstanceError(f"table missing {len(missing)} subsets, first mask {missing[0]}")
            return EntropyTable.from_dict(n, entries, validate=validate, labels=labels)
    except (GroundSetError, ZeroDivisionError, TypeError) as exc:
        raise InstanceError(str(exc)) from None
    except ValueError as exc:
        if isinstance(exc, (InstanceError, PolymatroidError)):
            raise
        raise InstanceError(str(exc)) from None
    raise InstanceError(f"unknown instance type {kind!r}")


def load_instance(path, *, validate: bool = True) -> EntropyOracle:
    with open(path, encoding="utf-8") as fh:
        return parse_instance(fh.read(), validate=validate)


def dump_instance(o: EntropyOracle) -> str:
    return json.dumps(o.to_json(), indent=None, separators=(", ", ": ")) + "\n"
