import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Tuple

import networkx as nx

from models.errors import ConsistencyError, DomainError, PreconditionError
from models.faces import TwoFace, enumerate_faces, face_report, phi_face
from models.set_function import GroundSet, SetFunctionOracle
from services.settings import get_settings
from utils.classifier import is_submodular
from utils.transform import sd_transform

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ParityConstraint:
    """chi_T(u) + chi_T(v) = parity (mod 2), demanded by a face with nonzero slack."""

    pair: Tuple[int, int]
    parity: int
    witness_face: TwoFace
    witness_value: Fraction


def face_constraint(g: SetFunctionOracle, face: TwoFace) -> Optional[ParityConstraint]:
    value = phi_face(g, face)
    if value == 0:
        return None
    return ParityConstraint(face.pair, int(value < 0), face, value)


class ParityUnionFind:
    """Union-find over elements that also tracks each element's parity to its root."""

    def __init__(self, size: int):
        self.parent = list(range(size))
        self.rank = [0] * size
        self.parity = [0] * size

    def find(self, x: int) -> Tuple[int, int]:
        """(root, parity of x relative to root), compressing the path on the way"""
        path = []
        while self.parent[x] != x:
            path.append(x)
            x = self.parent[x]
        root = x
        # walk back from the node nearest the root so parities accumulate
        acc = 0
        for node in reversed(path):
            acc ^= self.parity[node]
            self.parity[node] = acc
            self.parent[node] = root
        return root, (self.parity[path[0]] if path else 0)

    def union(self, x: int, y: int, parity: int) -> bool:
        """Impose parity(x) xor parity(y) == parity; False on contradiction."""
        root_x, px = self.find(x)
        root_y, py = self.find(y)
        if root_x == root_y:
            return (px ^ py) == parity
        if self.rank[root_x] < self.rank[root_y]:
            root_x, root_y = root_y, root_x
            px, py = py, px
        self.parent[root_y] = root_x
        self.parity[root_y] = px ^ py ^ parity
        if self.rank[root_x] == self.rank[root_y]:
            self.rank[root_x] += 1
        return True


@dataclass(frozen=True)
class ParityConflict:
    """Why a parity system has no solution.

    kind "pair": two faces on one pair disagree. kind "cycle": the constraints
    around a cycle of pairs have odd total parity; every witness on it is kept.
    """

    kind: str
    pair: Tuple[int, int]
    constraints: Tuple[ParityConstraint, ...]

    def to_report(self, ground: GroundSet) -> Dict:
        names = ground.elements
        return {
            'kind': self.kind,
            'pair': [names[self.pair[0]], names[self.pair[1]]],
            'faces': [
                dict(face_report(ground, c.witness_face, c.witness_value), parity=c.parity)
                for c in self.constraints
            ],
        }


@dataclass
class ParitySystem:
    ground: GroundSet
    constraints: Dict[Tuple[int, int], ParityConstraint]
    conflict: Optional[ParityConflict] = None

    @property
    def feasible(self) -> bool:
        return self.conflict is None

    @property
    def status(self) -> str:
        return 'feasible' if self.feasible else 'infeasible'

    def ordered_constraints(self) -> List[ParityConstraint]:
        return [self.constraints[pair] for pair in sorted(self.constraints)]

    def satisfied_by(self, mask: int) -> bool:
        return all(
            ((mask >> c.pair[0] & 1) ^ (mask >> c.pair[1] & 1)) == c.parity
            for c in self.constraints.values()
        )


def _cycle_conflict(constraints: Dict[Tuple[int, int], ParityConstraint],
                    accepted: List[Tuple[int, int]], closing: ParityConstraint) -> ParityConflict:
    forest = nx.Graph()
    forest.add_edges_from(accepted)
    u, v = closing.pair
    path = nx.shortest_path(forest, u, v)
    cycle = [constraints[(min(a, b), max(a, b))] for a, b in zip(path, path[1:])]
    return ParityConflict('cycle', closing.pair, tuple(cycle) + (closing,))


def _union_constraints(system: ParitySystem) -> Tuple[ParityUnionFind, Optional[ParityConflict]]:
    uf = ParityUnionFind(system.ground.n)
    accepted = []
    for constraint in system.ordered_constraints():
        u, v = constraint.pair
        if not uf.union(u, v, constraint.parity):
            return uf, _cycle_conflict(system.constraints, accepted, constraint)
        accepted.append(constraint.pair)
    return uf, None


def build_parity_system(g: SetFunctionOracle) -> ParitySystem:
    """Scan every face of g; one constraint per pair, first witness in face order.

    Below two elements there are no faces, so the system is empty and feasible.
    """
    ground = g.ground
    constraints: Dict[Tuple[int, int], ParityConstraint] = {}
    system = ParitySystem(ground, constraints)
    for face in enumerate_faces(ground):
        constraint = face_constraint(g, face)
        if constraint is None:
            continue
        first = constraints.get(constraint.pair)
        if first is None:
            constraints[constraint.pair] = constraint
        elif first.parity != constraint.parity:
            system.conflict = ParityConflict('pair', constraint.pair, (first, constraint))
            logger.info(f"Parity conflict on pair {constraint.pair}")
            return system

    _, conflict = _union_constraints(system)
    system.conflict = conflict
    if conflict is not None:
        logger.info(f"Parity conflict around a cycle closed by pair {conflict.pair}")
    return system


@dataclass(frozen=True)
class SolutionFamily:
    """All solutions: any choice of flips of the blocks applied to `base`.

    Blocks are ordered by lowest element; `base` puts each block's lowest
    element outside T.
    """

    ground: GroundSet
    blocks: Tuple[int, ...]
    base: int

    @property
    def free_bit_count(self) -> int:
        return len(self.blocks)

    @property
    def count(self) -> int:
        return 1 << len(self.blocks)

    def representative(self) -> int:
        return self.base

    def contains(self, mask: int) -> bool:
        diff = self.ground.check_mask(mask) ^ self.base
        return all(diff & block in (0, block) for block in self.blocks)

    def solutions(self, cap_log2: Optional[int] = None) -> Iterator[int]:
        if cap_log2 is None:
            cap_log2 = get_settings().solution_cap_log2
        k = len(self.blocks)
        if k > cap_log2:
            raise DomainError(f"{1 << k} solutions exceed the enumeration cap of 2^{cap_log2}")
        for choice in range(1 << k):
            mask = self.base
            for i, block in enumerate(self.blocks):
                if choice >> i & 1:
                    mask ^= block
            yield mask

    def to_report(self) -> Dict:
        return {
            'blocks': [self.ground.names_of(block) for block in self.blocks],
            'representative': self.ground.names_of(self.base),
            'solution_count_log2': len(self.blocks),
        }


def solve_canonical(g: SetFunctionOracle, system: Optional[ParitySystem] = None) -> Optional[SolutionFamily]:
    """Canonical sets of g (T with g o sigma_T submodular), or None if there are none."""
    if system is None:
        system = build_parity_system(g)
    if not system.feasible:
        return None
    uf, conflict = _union_constraints(system)
    if conflict is not None:
        raise ConsistencyError("parity system marked feasible but its constraints conflict")

    ground = system.ground
    block_of: Dict[int, int] = {}
    lowest_parity: Dict[int, int] = {}
    blocks: List[int] = []
    base = 0
    for element in range(ground.n):
        root, parity = uf.find(element)
        if root not in block_of:
            # elements arrive in index order, so this is the block's lowest element
            block_of[root] = len(blocks)
            lowest_parity[root] = parity
            blocks.append(0)
        blocks[block_of[root]] |= 1 << element
        if parity != lowest_parity[root]:
            base |= 1 << element
    return SolutionFamily(ground, tuple(blocks), base)


def brute_force_canonical_sets(g: SetFunctionOracle) -> List[int]:
    """Every T with g o sigma_T submodular, by exhaustive replay (2^n transforms)"""
    return [mask for mask in range(g.ground.size) if is_submodular(sd_transform(g, mask)).holds]


def strict_canonical(g: SetFunctionOracle, pivot: int = 0) -> int:
    """Canonical set of an SD-transformation of a strictly submodular function.

    Queries g at the empty set, {u*}, and {v}, {u*, v} for every other v:
    2n distinct subsets. T collects the v whose face slack at the empty set is negative.
    """
    ground = g.ground
    if not 0 <= pivot < ground.n:
        raise DomainError(f"pivot index {pivot} out of range for a ground set of size {ground.n}")
    if ground.n < 2:
        raise DomainError("strict canonical search needs at least two elements")
    bottom = g.evaluate(0)
    pivot_bit = 1 << pivot
    pivot_value = g.evaluate(pivot_bit)
    result = 0
    for v in range(ground.n):
        if v == pivot:
            continue
        slack = pivot_value + g.evaluate(1 << v) - g.evaluate(pivot_bit | 1 << v) - bottom
        if slack == 0:
            face = TwoFace(u=pivot, v=v, base=0)
            raise PreconditionError(
                f"face {face.describe(ground)} has zero slack; g is not an SD-transformation "
                f"of a strictly submodular function",
                witness=face, value=slack,
            )
        if slack < 0:
            result |= 1 << v
    return result
