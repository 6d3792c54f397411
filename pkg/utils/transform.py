from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Sequence

from models.errors import DomainError
from models.faces import TwoFace
from models.set_function import GroundSet, SetFunction, SetFunctionOracle

CORNER_ROLES = ('base', 'u', 'v', 'top')


@dataclass(frozen=True)
class SdMap:
    """The involution X -> X xor S on subsets."""

    canon: int

    def __call__(self, mask: int) -> int:
        return mask ^ self.canon

    def then(self, other: 'SdMap') -> 'SdMap':
        return SdMap(self.canon ^ other.canon)


class SdView:
    """Lazy g(X) = f(X xor S); each query is forwarded to the inner oracle."""

    def __init__(self, inner: SetFunctionOracle, canon: int):
        self.inner = inner
        self.ground: GroundSet = inner.ground
        self.canon = self.ground.check_mask(canon)
        self.provenance = _transform_label(getattr(inner, 'provenance', ''), self.ground, self.canon)

    def evaluate(self, mask: int) -> Fraction:
        return self.inner.evaluate(self.ground.check_mask(mask) ^ self.canon)

    def __call__(self, mask: int) -> Fraction:
        return self.evaluate(mask)

    def materialize(self) -> SetFunction:
        return SetFunction(self.ground, [self.evaluate(mask) for mask in range(self.ground.size)],
                           self.provenance)


def _transform_label(provenance: str, ground: GroundSet, canon: int) -> str:
    if canon == 0:
        return provenance
    return f"{provenance} o sd[{ground.format_subset(canon)}]"


def sd_map(canon: int, mask: int) -> int:
    return mask ^ canon


def sd_transform(f: SetFunctionOracle, canon: int, lazy: bool = False):
    """g = f o sigma_S, as a new table, or as an SdView when lazy is set."""
    view = SdView(f, canon)
    if lazy:
        return view
    if canon == 0 and isinstance(f, SetFunction):
        return f
    return view.materialize()


def face_sd_map(canon: int, face: TwoFace) -> TwoFace:
    """Image of a 2-face: (X xor S) minus {u, v}, same pair"""
    return TwoFace(u=face.u, v=face.v, base=(face.base ^ canon) & ~face.pair_mask)


def _role(face: TwoFace, corner: int) -> str:
    has_u = corner >> face.u & 1
    has_v = corner >> face.v & 1
    return CORNER_ROLES[has_u + 2 * has_v]


def corner_roles(canon: int, face: TwoFace) -> Dict[str, str]:
    """Where each corner role of `face` lands in the image face.

    An odd |S & {u, v}| swaps the diagonal pairs, which is exactly the sign flip
    of the face slack.
    """
    image = face_sd_map(canon, face)
    return {
        role: _role(image, corner ^ canon)
        for role, corner in zip(CORNER_ROLES, face.corners())
    }


def flips_sign(canon: int, face: TwoFace) -> bool:
    return bin(canon & face.pair_mask).count('1') % 2 == 1


def relabel(f: SetFunction, perm: Sequence[int]) -> SetFunction:
    """Rename elements: bit i of the argument moves to bit perm[i]."""
    n = f.n
    perm = [int(p) for p in perm]
    if sorted(perm) != list(range(n)):
        raise DomainError(f"relabeling must be a permutation of 0..{n - 1}, got {perm}")
    values = [Fraction(0)] * f.ground.size
    for mask in range(f.ground.size):
        image = 0
        for i in range(n):
            if mask >> i & 1:
                image |= 1 << perm[i]
        values[image] = f.evaluate(mask)
    return SetFunction(f.ground, values, f"{f.provenance} relabeled {perm}")
