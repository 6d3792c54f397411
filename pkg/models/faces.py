from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterator, Tuple

from models.errors import DomainError
from models.set_function import GroundSet, SetFunctionOracle, format_rational


@dataclass(frozen=True, order=True)
class TwoFace:
    """The 2-face {X, X+u, X+v, X+u+v} of the hypercube, stored with u < v.

    Ordering matches enumeration order: pair first, then base.
    """

    u: int
    v: int
    base: int

    def __post_init__(self):
        u, v = self.u, self.v
        if u == v:
            raise DomainError(f"a 2-face needs two distinct elements, got {u} twice")
        if u < 0 or v < 0:
            raise DomainError(f"element indices must be nonnegative, got ({u}, {v})")
        if u > v:
            object.__setattr__(self, 'u', v)
            object.__setattr__(self, 'v', u)
        if self.base < 0 or self.base & self.pair_mask:
            raise DomainError(f"base {self.base:b} of a 2-face must avoid its pair ({self.u}, {self.v})")

    @classmethod
    def of(cls, base: int, u: int, v: int) -> 'TwoFace':
        return cls(u=u, v=v, base=base)

    @property
    def pair(self) -> Tuple[int, int]:
        return (self.u, self.v)

    @property
    def pair_mask(self) -> int:
        return (1 << self.u) | (1 << self.v)

    def corners(self) -> Tuple[int, int, int, int]:
        """(X, X+u, X+v, X+u+v)"""
        x = self.base
        return (x, x | 1 << self.u, x | 1 << self.v, x | self.pair_mask)

    def check(self, ground: GroundSet) -> 'TwoFace':
        if self.v >= ground.n or self.base > ground.full:
            raise DomainError(f"{self} does not fit a ground set of size {ground.n}")
        return self

    def describe(self, ground: GroundSet) -> Dict:
        return {
            'base': ground.names_of(self.base),
            'pair': [ground.elements[self.u], ground.elements[self.v]],
        }


def face_count(n: int) -> int:
    if n < 2:
        return 0
    return (1 << (n - 2)) * n * (n - 1) // 2


def pair_faces(ground: GroundSet, u: int, v: int) -> Iterator[TwoFace]:
    """Faces on one pair, base ascending"""
    pair_mask = (1 << u) | (1 << v)
    for base in range(ground.size):
        if not base & pair_mask:
            yield TwoFace(u=u, v=v, base=base)


def enumerate_faces(ground: GroundSet) -> Iterator[TwoFace]:
    """Every 2-face once: pairs lexicographically, then base ascending."""
    n = ground.n
    for u in range(n):
        for v in range(u + 1, n):
            yield from pair_faces(ground, u, v)


def phi(f: SetFunctionOracle, x: int, y: int) -> Fraction:
    """f(X) + f(Y) - f(X | Y) - f(X & Y)"""
    return f.evaluate(x) + f.evaluate(y) - f.evaluate(x | y) - f.evaluate(x & y)


def phi_face(f: SetFunctionOracle, face: TwoFace) -> Fraction:
    """Submodularity slack of one face, f(X+u) + f(X+v) - f(X+u+v) - f(X)"""
    x, xu, xv, xuv = face.corners()
    return f.evaluate(xu) + f.evaluate(xv) - f.evaluate(xuv) - f.evaluate(x)


def face_report(ground: GroundSet, face: TwoFace, value: Fraction) -> Dict:
    report = face.describe(ground)
    report['value'] = format_rational(value)
    return report
