import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, Optional, Sequence, Tuple

from models.errors import DomainError
from models.faces import TwoFace, enumerate_faces, face_report, phi, phi_face
from models.set_function import SetFunctionOracle, format_rational, parse_rational

logger = logging.getLogger(__name__)

KINDS = ('submodular', 'strict', 'modular')

# A face value satisfies the class condition iff the predicate holds.
_FACE_CONDITIONS: Dict[str, Callable[[Fraction], bool]] = {
    'submodular': lambda value: value >= 0,
    'strict': lambda value: value > 0,
    'modular': lambda value: value == 0,
}


@dataclass(frozen=True)
class ClassCertificate:
    kind: str
    holds: bool
    witness: Optional[TwoFace] = None
    witness_value: Optional[Fraction] = None
    # set by pairwise_certificate
    witness_pair: Optional[Tuple[int, int]] = None

    @property
    def verdict(self) -> str:
        return 'yes' if self.holds else 'no'

    def __bool__(self) -> bool:
        return self.holds

    def to_report(self, ground) -> Dict:
        report = {'kind': self.kind, 'verdict': self.verdict}
        if self.witness is not None:
            report['witness'] = face_report(ground, self.witness, self.witness_value)
        elif self.witness_pair is not None:
            x, y = self.witness_pair
            report['witness'] = {
                'x': ground.names_of(x),
                'y': ground.names_of(y),
                'value': format_rational(self.witness_value),
            }
        return report


def _check_kind(kind: str) -> Callable[[Fraction], bool]:
    try:
        return _FACE_CONDITIONS[kind]
    except KeyError:
        raise DomainError(f"unknown function class {kind!r}; expected one of {', '.join(KINDS)}")


def face_certificate(f: SetFunctionOracle, kind: str) -> ClassCertificate:
    """Scan faces in enumeration order and stop at the first violation.

    Sequential order makes the reported witness the lexicographically first one.
    """
    condition = _check_kind(kind)
    if kind == 'strict' and f.ground.n < 2:
        raise DomainError("strict submodularity needs at least two elements")
    for face in enumerate_faces(f.ground):
        value = phi_face(f, face)
        if not condition(value):
            logger.debug(f"{kind} check failed at {face} with slack {value}")
            return ClassCertificate(kind, False, face, value)
    return ClassCertificate(kind, True)


def is_submodular(f: SetFunctionOracle) -> ClassCertificate:
    return face_certificate(f, 'submodular')


def is_strictly_submodular(f: SetFunctionOracle) -> ClassCertificate:
    return face_certificate(f, 'strict')


def is_modular(f: SetFunctionOracle) -> ClassCertificate:
    return face_certificate(f, 'modular')


def pairwise_certificate(f: SetFunctionOracle, kind: str) -> ClassCertificate:
    """Brute force over all pairs X < Y straight from the pairwise definitions.

    Strictness only constrains incomparable pairs; comparable pairs have Phi = 0.
    """
    condition = _check_kind(kind)
    size = f.ground.size
    for x in range(size):
        for y in range(x + 1, size):
            if kind == 'strict' and (x & y == x or x & y == y):
                continue
            value = phi(f, x, y)
            if not condition(value):
                return ClassCertificate(kind, False, witness_value=value, witness_pair=(x, y))
    return ClassCertificate(kind, True)


def _as_point(f: SetFunctionOracle, point: Sequence) -> Tuple[Fraction, ...]:
    coords = tuple(parse_rational(c) for c in point)
    if len(coords) != f.ground.n:
        raise DomainError(f"point has {len(coords)} coordinates, ground set has {f.ground.n}")
    return coords


def lovasz_extension(f: SetFunctionOracle, point: Sequence,
                     tie_break: Optional[Sequence[int]] = None) -> Fraction:
    """Lovász extension with the f(empty) offset.

    Coordinates are visited in descending order; equal coordinates go by
    ascending index unless `tie_break` gives another precedence order.
    """
    x = _as_point(f, point)
    n = len(x)
    if tie_break is None:
        rank = list(range(n))
    else:
        if sorted(tie_break) != list(range(n)):
            raise DomainError(f"tie_break must be a permutation of 0..{n - 1}")
        rank = [0] * n
        for position, index in enumerate(tie_break):
            rank[index] = position
    order = sorted(range(n), key=lambda i: (-x[i], rank[i]))

    bottom = f.evaluate(0)
    total = bottom
    prefix = 0
    previous = bottom
    for i in order:
        prefix |= 1 << i
        current = f.evaluate(prefix)
        total += x[i] * (current - previous)
        previous = current
    return total


def midpoint_convexity_gap(f: SetFunctionOracle, x: Sequence, y: Sequence) -> Fraction:
    """(f^(x) + f^(y)) / 2 - f^((x + y) / 2); negative means convexity fails"""
    a = _as_point(f, x)
    b = _as_point(f, y)
    mid = [(p + q) / 2 for p, q in zip(a, b)]
    return (lovasz_extension(f, a) + lovasz_extension(f, b)) / 2 - lovasz_extension(f, mid)


def indicator(n: int, mask: int) -> Tuple[Fraction, ...]:
    return tuple(Fraction(mask >> i & 1) for i in range(n))


def face_convexity_triple(f: SetFunctionOracle, face: TwoFace):
    """(chi(X+u), chi(X+v), midpoint) for a face; its gap equals the face slack / 2"""
    n = f.ground.n
    _, xu, xv, _ = face.corners()
    a = indicator(n, xu)
    b = indicator(n, xv)
    return a, b, tuple((p + q) / 2 for p, q in zip(a, b))
