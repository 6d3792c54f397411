import logging
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Protocol, Sequence, Set, Tuple, Union

import numpy as np

from models.errors import DomainError
from services.settings import get_settings

logger = logging.getLogger(__name__)

Rational = Union[Fraction, int, str]


def parse_rational(value) -> Fraction:
    """Parse an exact decimal, "p/q" string or integer into a Fraction.

    Floats are rejected: a binary float is never the exact value the user meant.
    """
    if isinstance(value, bool):
        raise DomainError(f"not a rational value: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if not text:
            raise DomainError("empty string is not a rational value")
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError):
            raise DomainError(f"not an exact decimal or p/q fraction: {value!r}")
    raise DomainError(f"values must be strings holding exact rationals, got {type(value).__name__} {value!r}")


def format_rational(value: Fraction) -> str:
    return str(value)


def popcounts(n: int) -> np.ndarray:
    """|X| for every bitmask X in 0..2^n-1"""
    masks = np.arange(1 << n, dtype=np.int64)
    counts = np.zeros(1 << n, dtype=np.int64)
    for i in range(n):
        counts += (masks >> i) & 1
    return counts


@dataclass(frozen=True)
class GroundSet:
    """The finite ground set V; element i is bit i of every bitmask."""

    elements: Tuple[str, ...]

    def __post_init__(self):
        elements = tuple(self.elements)
        object.__setattr__(self, 'elements', elements)
        if not elements:
            raise DomainError("ground set must contain at least one element")
        for name in elements:
            if not isinstance(name, str) or not name:
                raise DomainError(f"element names must be nonempty strings, got {name!r}")
            if ',' in name:
                raise DomainError(f"element names may not contain ',': {name!r}")
        if len(set(elements)) != len(elements):
            raise DomainError(f"element names must be unique: {list(elements)}")
        guard = get_settings().max_ground_size
        if len(elements) > guard:
            raise DomainError(
                f"ground set of size {len(elements)} exceeds the size guard {guard} "
                f"(set SDSUB_MAX_GROUND_SIZE or pass --allow-large)"
            )

    @classmethod
    def numbered(cls, n: int) -> 'GroundSet':
        if n < 1:
            raise DomainError(f"ground set size must be positive, got {n}")
        return cls(tuple(str(i + 1) for i in range(n)))

    @property
    def n(self) -> int:
        return len(self.elements)

    @property
    def full(self) -> int:
        return (1 << self.n) - 1

    @property
    def size(self) -> int:
        """Number of subsets, 2^n"""
        return 1 << self.n

    def index(self, name: str) -> int:
        try:
            return self.elements.index(name)
        except ValueError:
            raise DomainError(f"unknown element name {name!r}; ground set is {list(self.elements)}")

    def check_mask(self, mask: int) -> int:
        if not isinstance(mask, (int, np.integer)) or isinstance(mask, bool) or mask < 0 or mask > self.full:
            raise DomainError(f"bitmask {mask!r} out of range for a ground set of size {self.n}")
        return int(mask)

    def mask_of(self, names: Iterable[str]) -> int:
        mask = 0
        for name in names:
            mask |= 1 << self.index(name)
        return mask

    def names_of(self, mask: int) -> List[str]:
        self.check_mask(mask)
        return [name for i, name in enumerate(self.elements) if mask >> i & 1]

    def parse_subset(self, text: str) -> int:
        """Comma-joined element names; the empty string is the empty set"""
        text = text.strip()
        if not text:
            return 0
        return self.mask_of(part.strip() for part in text.split(','))

    def format_subset(self, mask: int) -> str:
        return ','.join(self.names_of(mask))

    def indices(self, mask: int) -> List[int]:
        return [i for i in range(self.n) if mask >> i & 1]


class SetFunctionOracle(Protocol):
    """Anything that answers f(X) for bitmasks over a ground set."""

    ground: GroundSet

    def evaluate(self, mask: int) -> Fraction:
        ...


class SetFunction:
    """Dense, immutable table of exact rational values, one per subset."""

    def __init__(self, ground: GroundSet, values: Sequence, provenance: str = ''):
        if len(values) != ground.size:
            raise DomainError(
                f"expected {ground.size} values for a ground set of size {ground.n}, got {len(values)}"
            )
        self.ground = ground
        self._values: Tuple[Fraction, ...] = tuple(parse_rational(v) for v in values)
        self.provenance = provenance

    @classmethod
    def from_callable(cls, ground: GroundSet, rule, provenance: str = '') -> 'SetFunction':
        return cls(ground, [rule(mask) for mask in range(ground.size)], provenance)

    @property
    def values(self) -> Tuple[Fraction, ...]:
        return self._values

    @property
    def n(self) -> int:
        return self.ground.n

    def evaluate(self, mask: int) -> Fraction:
        return self._values[self.ground.check_mask(mask)]

    def __call__(self, mask: int) -> Fraction:
        return self.evaluate(mask)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SetFunction):
            return NotImplemented
        return self.ground == other.ground and self._values == other._values

    def __hash__(self):
        return hash((self.ground, self._values))

    def __repr__(self) -> str:
        label = self.provenance or 'anonymous'
        return f"SetFunction({label}, n={self.n})"

    def _check_compatible(self, other: 'SetFunction') -> None:
        if self.ground != other.ground:
            raise DomainError("set functions live on different ground sets")

    def __add__(self, other: 'SetFunction') -> 'SetFunction':
        if not isinstance(other, SetFunction):
            return NotImplemented
        self._check_compatible(other)
        values = [a + b for a, b in zip(self._values, other._values)]
        return SetFunction(self.ground, values, f"({self.provenance} + {other.provenance})")

    def __neg__(self) -> 'SetFunction':
        return SetFunction(self.ground, [-v for v in self._values], f"-({self.provenance})")

    def __sub__(self, other: 'SetFunction') -> 'SetFunction':
        if not isinstance(other, SetFunction):
            return NotImplemented
        return self + (-other)

    def scaled(self, factor: Rational) -> 'SetFunction':
        factor = parse_rational(factor)
        return SetFunction(self.ground, [factor * v for v in self._values],
                           f"{factor}*({self.provenance})")

    def minimizers(self) -> List[int]:
        low = min(self._values)
        return [mask for mask, value in enumerate(self._values) if value == low]

    def maximizers(self) -> List[int]:
        high = max(self._values)
        return [mask for mask, value in enumerate(self._values) if value == high]


class CountedOracle:
    """Transparent wrapper that records every query made to an oracle.

    Counts are kept under a lock so concurrent readers see serialized increments.
    """

    def __init__(self, inner: SetFunctionOracle):
        self.inner = inner
        self.ground = inner.ground
        self.provenance = getattr(inner, 'provenance', '')
        self._lock = threading.Lock()
        self._distinct: Set[int] = set()
        self._total = 0

    def evaluate(self, mask: int) -> Fraction:
        value = self.inner.evaluate(mask)
        with self._lock:
            self._distinct.add(int(mask))
            self._total += 1
        return value

    def __call__(self, mask: int) -> Fraction:
        return self.evaluate(mask)

    @property
    def distinct_queries(self) -> Set[int]:
        with self._lock:
            return set(self._distinct)

    @property
    def distinct_count(self) -> int:
        with self._lock:
            return len(self._distinct)

    @property
    def total_calls(self) -> int:
        with self._lock:
            return self._total

    def reset(self) -> None:
        with self._lock:
            self._distinct.clear()
            self._total = 0


def evaluate(f: SetFunctionOracle, mask: int) -> Fraction:
    return f.evaluate(mask)


def counted(f: SetFunctionOracle) -> CountedOracle:
    return CountedOracle(f)


def materialize(f: SetFunctionOracle, provenance: str = '') -> SetFunction:
    """Table of an arbitrary oracle (touches all 2^n subsets)"""
    if isinstance(f, SetFunction):
        return f
    label = provenance or getattr(f, 'provenance', '')
    return SetFunction(f.ground, [f.evaluate(mask) for mask in range(f.ground.size)], label)
