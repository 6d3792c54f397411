import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from models.errors import ConsistencyError, DomainError
from models.faces import TwoFace, enumerate_faces, phi_face
from models.set_function import GroundSet, SetFunction, parse_rational, popcounts

logger = logging.getLogger(__name__)

DIP = Fraction(1, 2)

# Frozen output of search_figure1_like() with values in {0, 1, 2}.
FIGURE1_LIKE_TABLE = (0, 0, 0, 0, 1, 0, 1, 0)

# Faces on pair {1, 2} with slack +1 at the empty base and -1 at base {3}.
PARITY_CONFLICT_TABLE = (0, 1, 0, 0, 0, 0, 0, 1)


def _check_nonempty(ground: GroundSet, mask: int, what: str) -> int:
    mask = ground.check_mask(mask)
    if mask == 0:
        raise DomainError(f"{what} must be nonempty")
    return mask


def check_partition(ground: GroundSet, parts: Sequence[int]) -> Tuple[int, ...]:
    seen = 0
    for part in parts:
        part = _check_nonempty(ground, part, "every part of a partition")
        if part & seen:
            raise DomainError(f"parts overlap on {ground.names_of(part & seen)}")
        seen |= part
    if seen != ground.full:
        raise DomainError(f"partition misses {ground.names_of(ground.full ^ seen)}")
    return tuple(int(p) for p in parts)


def _parts_label(ground: GroundSet, parts: Sequence[int]) -> str:
    return ';'.join(ground.format_subset(p) for p in parts)


def gen_not_clique() -> SetFunction:
    ground = GroundSet.numbered(3)
    one_three = ground.mask_of(['1', '3'])
    return SetFunction.from_callable(
        ground,
        lambda mask: 0 if mask == 0 else (2 if mask == one_three else 1),
        'not-clique',
    )


def gen_part_min(ground: GroundSet, part: int) -> SetFunction:
    """min(|X & U|, |U - X|)"""
    part = _check_nonempty(ground, part, "U")
    size = bin(part).count('1')

    def rule(mask):
        inside = bin(mask & part).count('1')
        return min(inside, size - inside)

    return SetFunction.from_callable(ground, rule, f"part-min(U={ground.format_subset(part)})")


def gen_partition_distance(ground: GroundSet, parts: Sequence[int]) -> SetFunction:
    """Distance from X to the nearest union of parts, sum of min(|X & U_i|, |U_i - X|)"""
    parts = check_partition(ground, parts)
    sizes = [bin(p).count('1') for p in parts]

    def rule(mask):
        total = 0
        for part, size in zip(parts, sizes):
            inside = bin(mask & part).count('1')
            total += min(inside, size - inside)
        return total

    return SetFunction.from_callable(ground, rule,
                                     f"partition-distance(parts={_parts_label(ground, parts)})")


def gen_min_dip(ground: GroundSet, dip_set: int) -> SetFunction:
    """|X|, lowered by 1/2 at X = U"""
    dip_set = _check_nonempty(ground, dip_set, "dip set U")
    counts = popcounts(ground.n)
    values = [Fraction(int(c)) for c in counts]
    values[dip_set] -= DIP
    return SetFunction(ground, values, f"min-dip(U={ground.format_subset(dip_set)})")


def gen_modular(ground: GroundSet, weights: Sequence, offset=0) -> SetFunction:
    weights = [parse_rational(w) for w in weights]
    if len(weights) != ground.n:
        raise DomainError(f"expected {ground.n} weights, got {len(weights)}")
    offset = parse_rational(offset)
    values = [offset] * ground.size
    # f(X) = f(X - lowest) + w(lowest)
    for mask in range(1, ground.size):
        low = (mask & -mask).bit_length() - 1
        values[mask] = values[mask & (mask - 1)] + weights[low]
    label = ','.join(str(w) for w in weights)
    return SetFunction(ground, values, f"modular(weights={label};offset={offset})")


def gen_quadratic_strict(n: int, ground: Optional[GroundSet] = None) -> SetFunction:
    """-|X|^2, slack 2 on every face"""
    if n < 2:
        raise DomainError(f"quadratic fixture needs n >= 2, got {n}")
    ground = ground or GroundSet.numbered(n)
    counts = popcounts(ground.n)
    return SetFunction(ground, [-int(c) ** 2 for c in counts], f"quadratic(n={ground.n})")


def gen_separable_quadratic(ground: GroundSet, parts: Sequence[int]) -> SetFunction:
    """-sum |X & U_i|^2: strictly submodular inside each part, additive across parts"""
    parts = check_partition(ground, parts)

    def rule(mask):
        return -sum(bin(mask & part).count('1') ** 2 for part in parts)

    return SetFunction.from_callable(ground, rule,
                                     f"separable-quadratic(parts={_parts_label(ground, parts)})")


def gen_cut(ground: GroundSet, edges: Sequence[Tuple[int, int, object]]) -> SetFunction:
    """Weight of edges crossing (X, V - X)"""
    checked = []
    for u, v, weight in edges:
        if u == v:
            raise DomainError(f"self-loop on {ground.elements[u]} is not allowed in a cut function")
        if not (0 <= u < ground.n and 0 <= v < ground.n):
            raise DomainError(f"edge ({u}, {v}) leaves the ground set")
        weight = parse_rational(weight)
        if weight < 0:
            raise DomainError(f"cut weights must be nonnegative, got {weight}")
        checked.append((u, v, weight))

    def rule(mask):
        return sum((w for u, v, w in checked if (mask >> u & 1) != (mask >> v & 1)), Fraction(0))

    label = ','.join(f"{ground.elements[u]}-{ground.elements[v]}:{w}" for u, v, w in checked)
    return SetFunction.from_callable(ground, rule, f"cut(edges={label})")


def _figure1_faces() -> Tuple[TwoFace, TwoFace]:
    one, two, three = 0, 1, 2
    return (TwoFace(u=one, v=three, base=0), TwoFace(u=one, v=three, base=1 << two))


def search_figure1_like(values: Sequence[int] = (0, 1, 2)) -> Optional[Tuple[int, ...]]:
    """First table (lexicographic) that is submodular with nonzero slack exactly
    at faces (empty, {1,3}) and ({2}, {1,3})"""
    ground = GroundSet.numbered(3)
    targets = set(_figure1_faces())
    faces = list(enumerate_faces(ground))
    for table in itertools.product(values, repeat=ground.size):
        f = SetFunction(ground, table)
        slacks = [(face, phi_face(f, face)) for face in faces]
        if all(s >= 0 for _, s in slacks) and {face for face, s in slacks if s != 0} == targets:
            return tuple(table)
    return None


def gen_figure1_like() -> SetFunction:
    """Submodular f on {1,2,3} whose inequality graph is the single edge {1,3}"""
    return SetFunction(GroundSet.numbered(3), FIGURE1_LIKE_TABLE, 'figure1-like')


def gen_parity_conflict() -> SetFunction:
    """No SD-transformation of this function is submodular"""
    return SetFunction(GroundSet.numbered(3), PARITY_CONFLICT_TABLE, 'parity-conflict')


def random_partition(ground: GroundSet, rng: np.random.Generator) -> Tuple[int, ...]:
    k = int(rng.integers(1, ground.n + 1))
    labels = rng.integers(0, k, size=ground.n)
    parts: Dict[int, int] = {}
    for element, label in enumerate(labels):
        parts[int(label)] = parts.get(int(label), 0) | 1 << element
    return tuple(sorted(parts.values(), key=lambda p: p & -p))


def random_modular(ground: GroundSet, rng: np.random.Generator) -> SetFunction:
    weights = [Fraction(int(a), int(b)) for a, b in zip(rng.integers(-5, 6, size=ground.n),
                                                        rng.integers(1, 4, size=ground.n))]
    offset = Fraction(int(rng.integers(-3, 4)), 2)
    return gen_modular(ground, weights, offset)


def random_cut(ground: GroundSet, rng: np.random.Generator, density: float = 0.5) -> SetFunction:
    edges = []
    for u in range(ground.n):
        for v in range(u + 1, ground.n):
            if rng.random() < density:
                edges.append((u, v, Fraction(int(rng.integers(1, 5)), 2)))
    return gen_cut(ground, edges)


def random_submodular(ground: GroundSet, rng: np.random.Generator, terms: int = 3) -> SetFunction:
    """Nonnegative mixture of part-min functions, a cut and a modular term"""
    f = random_modular(ground, rng) + random_cut(ground, rng)
    for _ in range(terms):
        part = int(rng.integers(1, ground.size))
        f = f + gen_part_min(ground, part).scaled(int(rng.integers(1, 4)))
    return SetFunction(ground, f.values, f"random-submodular(n={ground.n})")


def random_table(ground: GroundSet, rng: np.random.Generator) -> SetFunction:
    values = [Fraction(int(v), 2) for v in rng.integers(-6, 7, size=ground.size)]
    return SetFunction(ground, values, f"random-table(n={ground.n})")


def zoo_functions(n: int, seed: int = 0) -> List[Tuple[str, SetFunction]]:
    """Named fixtures at size n, submodular and not, used across the test suite"""
    rng = np.random.default_rng(seed + n)
    ground = GroundSet.numbered(n)
    zoo = [
        ('modular', random_modular(ground, rng)),
        ('cardinality', gen_modular(ground, [1] * n)),
        ('partition-distance', gen_partition_distance(ground, random_partition(ground, rng))),
        ('part-min', gen_part_min(ground, int(rng.integers(1, ground.size)))),
        ('separable-quadratic', gen_separable_quadratic(ground, random_partition(ground, rng))),
        ('cut', random_cut(ground, rng)),
        ('random-submodular', random_submodular(ground, rng)),
        ('random-table', random_table(ground, rng)),
    ]
    if n >= 2:
        zoo.append(('quadratic', gen_quadratic_strict(n)))
        zoo.append(('min-dip-low', gen_min_dip(ground, 1)))
        zoo.append(('min-dip-high', gen_min_dip(ground, ground.full ^ 1)))
        zoo.append(('supermodular', -gen_quadratic_strict(n)))
    if n == 3:
        zoo.append(('not-clique', gen_not_clique()))
        zoo.append(('figure1-like', gen_figure1_like()))
        zoo.append(('parity-conflict', gen_parity_conflict()))
    return zoo


@dataclass(frozen=True)
class GeneratorSpec:
    """A generator kind plus its parameters, as given on the command line."""

    kind: str
    params: Dict[str, object] = field(default_factory=dict)

    def build(self) -> SetFunction:
        builder = GENERATORS.get(self.kind)
        if builder is None:
            raise DomainError(f"unknown generator {self.kind!r}; expected one of {', '.join(GENERATORS)}")
        try:
            f = builder(self.params)
        except KeyError as missing:
            raise DomainError(f"generator {self.kind} needs parameter {missing}")
        logger.info(f"Generated {f.provenance}")
        return f


def _ground_param(params: Dict) -> GroundSet:
    ground = params.get('ground')
    if ground is None:
        raise DomainError("this generator needs a ground set")
    return ground


def _build_quadratic(params):
    ground = params.get('ground')
    if ground is not None:
        return gen_quadratic_strict(ground.n, ground)
    if 'n' not in params:
        raise DomainError("quadratic generator needs n or a ground set")
    return gen_quadratic_strict(int(params['n']))


GENERATORS: Dict[str, Callable[[Dict], SetFunction]] = {
    'not-clique': lambda params: gen_not_clique(),
    'figure1-like': lambda params: gen_figure1_like(),
    'parity-conflict': lambda params: gen_parity_conflict(),
    'partition-distance': lambda params: gen_partition_distance(_ground_param(params), params['parts']),
    'separable-quadratic': lambda params: gen_separable_quadratic(_ground_param(params), params['parts']),
    'part-min': lambda params: gen_part_min(_ground_param(params), params['set']),
    'min-dip': lambda params: gen_min_dip(_ground_param(params), params['set']),
    'modular': lambda params: gen_modular(_ground_param(params), params['weights'],
                                          params.get('offset', 0)),
    'quadratic': _build_quadratic,
    'cut': lambda params: gen_cut(_ground_param(params), params.get('edges', [])),
}


def frozen_fixture_check() -> None:
    """Re-run the fixture search and compare with the frozen table"""
    found = search_figure1_like()
    if found != FIGURE1_LIKE_TABLE:
        raise ConsistencyError(f"fixture search returned {found}, frozen table is {FIGURE1_LIKE_TABLE}")
