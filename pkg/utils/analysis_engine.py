import logging
from typing import Dict, List, Optional, Sequence

from models.errors import DomainError
from models.faces import face_count, face_report
from models.set_function import GroundSet, SetFunction, counted, format_rational
from services.function_store import FunctionStore
from services.settings import get_settings
from utils.adversary import run_suite
from utils.canonical_solver import (
    brute_force_canonical_sets,
    build_parity_system,
    solve_canonical,
    strict_canonical,
)
from utils.classifier import face_certificate, lovasz_extension, pairwise_certificate
from utils.structure import boolean_matrix, inequality_graph, inseparable_decomposition
from utils.transform import sd_transform

logger = logging.getLogger(__name__)


class SetFunctionAnalysisEngine:
    """Runs one analysis per CLI subcommand and returns a JSON-ready report.

    A negative answer shows up as verdict "no", status "infeasible" or
    verified false; the CLI maps those to its own exit code.
    """

    def __init__(self, store: Optional[FunctionStore] = None):
        self.store = store or FunctionStore()
        self.settings = get_settings()

    def load(self, path: str):
        """(function, layout) from a JSON file, '-' for stdin"""
        return self.store.read(path)

    def save(self, f: SetFunction, path: Optional[str], layout: str = 'dense') -> Optional[str]:
        """Write to `path`; without a path, return the document text instead"""
        if path is None:
            return self.store.encode(f, layout)
        self.store.write(f, path, layout)
        return None

    def check(self, f: SetFunction, kind: str, brute: bool = False) -> Dict:
        certificate = face_certificate(f, kind)
        report = certificate.to_report(f.ground)
        report['faces_scanned'] = face_count(f.n)
        if brute:
            pairwise = pairwise_certificate(f, kind)
            report['pairwise_verdict'] = pairwise.verdict
            if pairwise.holds != certificate.holds:
                logger.error(f"Face and pairwise {kind} checks disagree on {f!r}")
        return report

    def transform(self, f: SetFunction, subset: str) -> Dict:
        canon = f.ground.parse_subset(subset)
        g = sd_transform(f, canon)
        return {'set': f.ground.names_of(canon), 'function': g}

    def graph(self, f: SetFunction, witnesses: bool = False, matrix: bool = False) -> Dict:
        report = inequality_graph(f).to_report(witnesses=witnesses)
        if matrix:
            report['matrix'] = [
                dict(face_report(f.ground, row.face, row.value), support=f.ground.names_of(row.support))
                for row in boolean_matrix(f)
            ]
        return report

    def decompose(self, f: SetFunction) -> Dict:
        return inseparable_decomposition(f).to_report()

    def canonical(self, g: SetFunction, brute: bool = False, enumerate_all: bool = False) -> Dict:
        system = build_parity_system(g)
        family = solve_canonical(g, system)
        report: Dict = {'status': system.status}
        if family is None:
            report['conflict'] = system.conflict.to_report(g.ground)
        else:
            report.update(family.to_report())
            if enumerate_all:
                report['solutions'] = [g.ground.names_of(t) for t in family.solutions()]
        if brute:
            found = brute_force_canonical_sets(g)
            report['brute_force_solutions'] = [g.ground.names_of(t) for t in found]
            expected = set() if family is None else set(family.solutions())
            report['brute_force_agrees'] = expected == set(found)
        return report

    def strict_canonical(self, g: SetFunction, verify: bool = False, trace: bool = False,
                         pivot: Optional[str] = None) -> Dict:
        pivot_index = 0 if pivot is None else g.ground.index(pivot)
        oracle = counted(g)
        result = strict_canonical(oracle, pivot=pivot_index)
        report: Dict = {'canonical': g.ground.names_of(result),
                        'pivot': g.ground.elements[pivot_index]}
        if trace:
            report['oracle_calls'] = {'distinct': oracle.distinct_count, 'total': oracle.total_calls}
        if verify:
            certificate = face_certificate(sd_transform(g, result), 'submodular')
            report['verified'] = certificate.holds
            if not certificate.holds:
                report['witness'] = face_report(g.ground, certificate.witness, certificate.witness_value)
        return report

    def lovasz(self, f: SetFunction, point: Sequence[str]) -> Dict:
        value = lovasz_extension(f, point)
        return {'value': format_rational(value)}

    def adversary(self, n: int, budget: int, strategies: Optional[List[str]] = None,
                  seed: Optional[int] = None) -> Dict:
        if seed is None:
            seed = self.settings.seed
        records = run_suite(n, budget, seed=seed, names=strategies)
        return {
            'n': n,
            'budget': budget,
            'lower_bound': (1 << n) - 2,
            'runs': [record.to_report() for record in records],
        }

    def parse_point(self, ground: GroundSet, text: str) -> List[str]:
        coords = [c.strip() for c in text.split(',')] if text.strip() else []
        if len(coords) != ground.n:
            raise DomainError(f"--point needs {ground.n} comma-separated coordinates, got {len(coords)}")
        return coords
