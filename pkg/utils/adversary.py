"""Adversarial oracle for canonical-set search with few queries.

The oracle answers |X| to every query. Once a strategy commits to an answer T,
the adversary looks among the unqueried proper subsets for a U with T not in
{U, V - U}; the dip function g_U agrees with every answer given and has exactly
U and V - U as canonical sets. Any strategy stopping after 2^n - 3 distinct
queries that include the empty set leaves two unqueried proper subsets; when T
was itself queried, at most one of them is the complement of T.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional

import numpy as np

from models.errors import DomainError, QueryBudgetExceeded
from models.set_function import GroundSet
from models.zoo import gen_min_dip

logger = logging.getLogger(__name__)

MIN_DEMO_SIZE = 2
MAX_DEMO_SIZE = 4


class AdversarialOracle:
    """Answers the cardinality of every query and records what was asked."""

    def __init__(self, ground: GroundSet, budget: int):
        self.ground = ground
        self.budget = budget
        self.queried: List[int] = []
        self._seen = set()

    def evaluate(self, mask: int) -> Fraction:
        mask = self.ground.check_mask(mask)
        if mask not in self._seen:
            if len(self._seen) >= self.budget:
                raise QueryBudgetExceeded(self.budget, mask)
            self._seen.add(mask)
            self.queried.append(mask)
        return Fraction(bin(mask).count('1'))

    @property
    def distinct_count(self) -> int:
        return len(self._seen)


Strategy = Callable[[AdversarialOracle, int], int]


def _proper_subsets(ground: GroundSet) -> List[int]:
    return list(range(1, ground.full))


def _dip_or(oracle: AdversarialOracle, fallback: int) -> int:
    for mask in oracle.queried:
        if oracle.evaluate(mask) < bin(mask).count('1'):
            return mask
    return fallback


def strategy_empty(oracle: AdversarialOracle, budget: int) -> int:
    return 0


def strategy_prefix(oracle: AdversarialOracle, budget: int) -> int:
    """Query subsets in ascending mask order; answer the dip, else the last query"""
    last = 0
    for mask in range(min(budget, oracle.ground.size)):
        oracle.evaluate(mask)
        last = mask
    return _dip_or(oracle, last)


def strategy_singletons(oracle: AdversarialOracle, budget: int) -> int:
    """Singletons first, then pairs, then larger sets, up to the budget"""
    ground = oracle.ground
    order = sorted(_proper_subsets(ground), key=lambda mask: (bin(mask).count('1'), mask))
    for mask in order[:budget]:
        oracle.evaluate(mask)
    return _dip_or(oracle, oracle.queried[-1] if oracle.queried else order[0])


def make_random_strategy(seed: int) -> Strategy:
    def strategy_random(oracle: AdversarialOracle, budget: int) -> int:
        """The empty set first, then distinct random subsets; answer the last one"""
        if budget < 1:
            return 0
        rng = np.random.default_rng(seed)
        oracle.evaluate(0)
        rest = list(range(1, oracle.ground.size))
        for index in rng.permutation(len(rest))[:budget - 1]:
            oracle.evaluate(rest[int(index)])
        return _dip_or(oracle, oracle.queried[-1])
    return strategy_random


def strategy_exhaustive(oracle: AdversarialOracle, budget: int) -> int:
    """Query every proper subset (2^n - 2 queries) and answer the dip"""
    for mask in _proper_subsets(oracle.ground):
        oracle.evaluate(mask)
    return _dip_or(oracle, 1)


LIMITED_STRATEGIES = ('empty', 'prefix', 'singletons', 'random')


def strategy_suite(seed: int = 0) -> Dict[str, Strategy]:
    return {
        'empty': strategy_empty,
        'prefix': strategy_prefix,
        'singletons': strategy_singletons,
        'random': make_random_strategy(seed),
        'exhaustive': strategy_exhaustive,
    }


@dataclass
class DemoRecord:
    ground: GroundSet
    strategy: str
    budget: int
    status: str
    queries: int
    answer: Optional[int] = None
    dip_set: Optional[int] = None
    consistent: bool = True
    unqueried: List[int] = field(default_factory=list)

    @property
    def refuted(self) -> bool:
        return self.status == 'refuted'

    def to_report(self) -> Dict:
        ground = self.ground
        report = {
            'strategy': self.strategy,
            'n': ground.n,
            'budget': self.budget,
            'status': self.status,
            'distinct_queries': self.queries,
            'unqueried': [ground.names_of(mask) for mask in self.unqueried],
        }
        if self.answer is not None:
            report['answer'] = ground.names_of(self.answer)
        if self.dip_set is not None:
            report['dip_set'] = ground.names_of(self.dip_set)
            report['canonical_sets'] = [ground.names_of(self.dip_set),
                                        ground.names_of(ground.full ^ self.dip_set)]
            report['consistent_with_answers'] = self.consistent
        return report


def adversary_demo(n: int, strategy: Strategy, budget: int, name: str = 'custom') -> DemoRecord:
    """Run one strategy against the cardinality adversary."""
    if not MIN_DEMO_SIZE <= n <= MAX_DEMO_SIZE:
        raise DomainError(f"adversary demo supports {MIN_DEMO_SIZE} <= n <= {MAX_DEMO_SIZE}, got {n}")
    if budget < 0:
        raise DomainError(f"query budget must be nonnegative, got {budget}")
    ground = GroundSet.numbered(n)
    oracle = AdversarialOracle(ground, budget)
    try:
        answer = ground.check_mask(strategy(oracle, budget))
    except QueryBudgetExceeded:
        logger.warning(f"Strategy {name} exhausted its budget of {budget} queries")
        return DemoRecord(ground, name, budget, 'budget_exhausted', oracle.distinct_count)

    seen = set(oracle.queried)
    unqueried = [mask for mask in range(ground.size) if mask not in seen]
    record = DemoRecord(ground, name, budget, 'not_refutable', len(seen), answer=answer,
                        unqueried=unqueried)
    for mask in unqueried:
        if mask in (0, ground.full) or answer in (mask, ground.full ^ mask):
            continue
        dip = gen_min_dip(ground, mask)
        record.status = 'refuted'
        record.dip_set = mask
        record.consistent = all(dip.evaluate(q) == oracle.evaluate(q) for q in oracle.queried)
        logger.info(f"Strategy {name} refuted with dip set {ground.names_of(mask)}")
        break
    return record


def run_suite(n: int, budget: int, seed: int = 0, names: Optional[List[str]] = None) -> List[DemoRecord]:
    suite = strategy_suite(seed)
    if names is None:
        names = list(suite)
    unknown = [name for name in names if name not in suite]
    if unknown:
        raise DomainError(f"unknown strategies {unknown}; expected some of {list(suite)}")
    return [adversary_demo(n, suite[name], budget, name) for name in names]
