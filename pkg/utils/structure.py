"""Inequality graph, canonical family and inseparable decomposition.

Building the graph costs Theta(2^n n^2) face evaluations in the worst case;
each pair stops at its first face with nonzero slack.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Tuple

import networkx as nx
import numpy as np

from models.errors import ConsistencyError, DomainError, PreconditionError
from models.faces import TwoFace, enumerate_faces, face_report, pair_faces, phi, phi_face
from models.set_function import GroundSet, SetFunctionOracle
from services.settings import get_settings
from utils.classifier import is_submodular

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BooleanRow:
    """One row of M_f: the pair indicator if the face slack is nonzero, else zero."""

    face: TwoFace
    support: int
    value: Fraction

    @property
    def is_zero(self) -> bool:
        return self.support == 0

    def holds_for(self, mask: int) -> bool:
        """Row times chi_S is 0 mod 2"""
        return bin(self.support & mask).count('1') % 2 == 0


def boolean_row(f: SetFunctionOracle, face: TwoFace) -> BooleanRow:
    value = phi_face(f, face)
    return BooleanRow(face, face.pair_mask if value != 0 else 0, value)


def boolean_matrix(f: SetFunctionOracle) -> List[BooleanRow]:
    return [boolean_row(f, face) for face in enumerate_faces(f.ground)]


def satisfies_boolean_system(f: SetFunctionOracle, mask: int) -> bool:
    """M_f chi_S = 0 (mod 2) over every row of the full matrix"""
    return all(row.holds_for(mask) for row in boolean_matrix(f))


@dataclass
class InequalityGraph:
    ground: GroundSet
    edges: Tuple[Tuple[int, int], ...]
    components: Tuple[int, ...]
    edge_witnesses: Dict[Tuple[int, int], Tuple[TwoFace, Fraction]] = field(default_factory=dict)

    @property
    def component_count(self) -> int:
        return len(self.components)

    @property
    def family_size(self) -> int:
        return 1 << len(self.components)

    def has_edge(self, u: int, v: int) -> bool:
        return (min(u, v), max(u, v)) in self.edges

    def is_union_of_components(self, mask: int) -> bool:
        self.ground.check_mask(mask)
        return all(mask & part in (0, part) for part in self.components)

    def respects(self, mask: int) -> bool:
        """Reduced system: chi_S(u) == chi_S(v) on every edge"""
        return all((mask >> u & 1) == (mask >> v & 1) for u, v in self.edges)

    def canonical_sets(self) -> Iterator[int]:
        """All unions of components, streamed in Gray-code order."""
        k = len(self.components)
        cap = get_settings().family_cap_log2
        if k > cap:
            raise DomainError(
                f"canonical family has 2^{k} members; enumeration is refused above 2^{cap} "
                f"(use family_size for the count)"
            )
        current = 0
        yield current
        for step in range(1, 1 << k):
            # the bit that changes between consecutive Gray codes
            flip = (step & -step).bit_length() - 1
            current ^= self.components[flip]
            yield current

    def to_report(self, witnesses: bool = False) -> Dict:
        names = self.ground.elements
        report = {
            'edges': sorted([sorted([names[u], names[v]]) for u, v in self.edges]),
            'components': [self.ground.names_of(part) for part in self.components],
        }
        if witnesses:
            report['witnesses'] = [
                face_report(self.ground, face, value)
                for face, value in (self.edge_witnesses[edge] for edge in self.edges)
            ]
        return report


def _first_nonzero_face(f: SetFunctionOracle, u: int, v: int) -> Optional[Tuple[TwoFace, Fraction]]:
    for face in pair_faces(f.ground, u, v):
        value = phi_face(f, face)
        if value != 0:
            return face, value
    return None


def inequality_graph(f: SetFunctionOracle) -> InequalityGraph:
    ground = f.ground
    graph = nx.Graph()
    graph.add_nodes_from(range(ground.n))
    witnesses = {}
    for u in range(ground.n):
        for v in range(u + 1, ground.n):
            found = _first_nonzero_face(f, u, v)
            if found is not None:
                graph.add_edge(u, v)
                witnesses[(u, v)] = found

    # components ordered by their lowest element
    components = sorted(
        (sum(1 << i for i in part) for part in nx.connected_components(graph)),
        key=lambda part: part & -part,
    )
    edges = tuple(sorted(witnesses))
    logger.debug(f"Inequality graph of {getattr(f, 'provenance', '')}: {len(edges)} edges, "
                 f"{len(components)} components")
    return InequalityGraph(ground, edges, tuple(components), witnesses)


def canonical_family(f: SetFunctionOracle) -> Iterator[int]:
    return inequality_graph(f).canonical_sets()


def require_submodular(f: SetFunctionOracle) -> None:
    certificate = is_submodular(f)
    if not certificate.holds:
        face = certificate.witness
        raise PreconditionError(
            f"function is not submodular: face {face.describe(f.ground)} has slack "
            f"{certificate.witness_value}",
            witness=face, value=certificate.witness_value,
        )


def is_sd_submodular(f: SetFunctionOracle, mask: int, graph: Optional[InequalityGraph] = None) -> bool:
    """Whether f o sigma_S stays submodular, for submodular f.

    S must be a union of connected components of the inequality graph.
    """
    require_submodular(f)
    if graph is None:
        graph = inequality_graph(f)
    return graph.is_union_of_components(mask)


def is_separable(f: SetFunctionOracle, mask: int) -> bool:
    ground = f.ground
    ground.check_mask(mask)
    if mask in (0, ground.full):
        raise DomainError("separability is defined only for nonempty proper subsets")
    return phi(f, mask, ground.full ^ mask) == 0


@dataclass(frozen=True)
class Decomposition:
    ground: GroundSet
    parts: Tuple[int, ...]
    verified: bool
    checked: int
    exhaustive: bool

    def to_report(self) -> Dict:
        return {
            'parts': [self.ground.names_of(part) for part in self.parts],
            'verified': self.verified,
            'checked_subsets': self.checked,
            'verification': 'exhaustive' if self.exhaustive else 'sampled',
        }


def _additive_on(f: SetFunctionOracle, parts: Tuple[int, ...], mask: int) -> bool:
    bottom = f.evaluate(0)
    rho = f.evaluate(mask) - bottom
    return rho == sum((f.evaluate(mask & part) - bottom for part in parts), Fraction(0))


def inseparable_decomposition(f: SetFunctionOracle, check_submodular: bool = True) -> Decomposition:
    """Components of the inequality graph, with rho(X) = sum rho(X & U_i) self-checked.

    The check is exhaustive up to the configured size, sampled beyond it.
    """
    if check_submodular:
        require_submodular(f)
    settings = get_settings()
    ground = f.ground
    parts = inequality_graph(f).components

    exhaustive = ground.n <= settings.exhaustive_verify_max_n
    if exhaustive:
        masks = range(ground.size)
    else:
        rng = np.random.default_rng(settings.seed)
        masks = (int(m) for m in rng.integers(0, ground.size, size=settings.verify_samples))

    checked = 0
    for mask in masks:
        if not _additive_on(f, parts, mask):
            raise ConsistencyError(
                f"decomposition {[ground.names_of(p) for p in parts]} is not additive at "
                f"{ground.names_of(mask)}"
            )
        checked += 1
    logger.info(f"Decomposed into {len(parts)} parts, verified on {checked} subsets")
    return Decomposition(ground, parts, True, checked, exhaustive)
