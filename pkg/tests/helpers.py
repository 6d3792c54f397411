from fractions import Fraction
from typing import List, Tuple

import pytest

from models.set_function import GroundSet, SetFunction
from models.zoo import zoo_functions
from utils.classifier import is_submodular


def small_zoo(sizes=range(2, 6)) -> List[Tuple[int, str, SetFunction]]:
    return [(n, name, f) for n in sizes for name, f in zoo_functions(n)]


def zoo_ids(entries) -> List[str]:
    return [f"{name}-n{n}" for n, name, _ in entries]


def zoo_params(sizes=range(2, 5), slow_sizes=(5,), submodular_only: bool = False) -> list:
    """(n, name, f) parameters; the entries at slow_sizes carry the slow marker"""
    params = []
    for marks, group in (((), sizes), ((pytest.mark.slow,), slow_sizes)):
        for n, name, f in small_zoo(group):
            if submodular_only and not is_submodular(f).holds:
                continue
            params.append(pytest.param(n, name, f, id=f"{name}-n{n}", marks=marks))
    return params


def table(values, names=None) -> SetFunction:
    n = (len(values) - 1).bit_length()
    ground = GroundSet(tuple(names)) if names else GroundSet.numbered(n)
    return SetFunction(ground, [Fraction(v) for v in values])


def subset(ground: GroundSet, text: str) -> int:
    return ground.parse_subset(text)
