import argparse
import contextlib
import dataclasses
import json
import logging
import os
import sys
from logging.handlers import RotatingFileHandler
from typing import Dict, List, Optional, Tuple

from models.errors import SetFunctionError
from models.set_function import GroundSet
from models.zoo import GENERATORS, GeneratorSpec
from services.function_store import LAYOUTS, dump_report
from services.settings import get_settings, override_settings
from utils.adversary import strategy_suite
from utils.analysis_engine import SetFunctionAnalysisEngine
from utils.classifier import KINDS

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NEGATIVE = 2

# Guard used by --allow-large
LARGE_GROUND_SIZE = 26

# Options whose values may start with a minus sign
RATIONAL_OPTIONS = ('--point', '--weights', '--offset', '--edges')


def configure_logging(verbose: bool = False) -> None:
    settings = get_settings()
    level = logging.DEBUG if verbose else getattr(logging, settings.log_level)
    logging.basicConfig(level=level, stream=sys.stderr,
                        format='%(asctime)s %(levelname)s %(name)s: %(message)s')

    if settings.log_file:
        log_dir = os.path.dirname(settings.log_file)
        if log_dir and not os.path.exists(log_dir):
            os.makedirs(log_dir)
        file_handler = RotatingFileHandler(settings.log_file, maxBytes=10240, backupCount=10)
        file_handler.setFormatter(logging.Formatter(
            '%(asctime)s %(levelname)s: %(message)s [in %(pathname)s:%(lineno)d]'
        ))
        file_handler.setLevel(logging.INFO)
        logging.getLogger().addHandler(file_handler)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='sdsub',
        description='Submodularity checks, SD-transformations and canonical sets of set functions.',
    )
    parser.add_argument('--verbose', action='store_true', help='log debug output to stderr')
    parser.add_argument('--allow-large', action='store_true',
                        help=f'raise the ground-set size guard to {LARGE_GROUND_SIZE}')
    sub = parser.add_subparsers(dest='command', required=True)

    check = sub.add_parser('check', help='certify a function class on every 2-face')
    check.add_argument('--kind', choices=KINDS, default='submodular')
    check.add_argument('--brute', action='store_true', help='also run the all-pairs definition')
    check.add_argument('file')

    transform = sub.add_parser('transform', help='write f o sigma_S')
    transform.add_argument('--set', required=True, dest='subset',
                           help='comma-joined element names; "" is the empty set')
    transform.add_argument('file')
    transform.add_argument('-o', '--output', required=True)

    graph = sub.add_parser('graph', help='inequality graph and its components')
    graph.add_argument('--witnesses', action='store_true', help='first nonzero face per edge')
    graph.add_argument('--matrix', action='store_true', help='every row of the Boolean matrix')
    graph.add_argument('file')

    decompose = sub.add_parser('decompose', help='inseparable decomposition')
    decompose.add_argument('file')

    canonical = sub.add_parser('canonical', help='all canonical sets via the parity system')
    canonical.add_argument('--brute', action='store_true', help='cross-check against 2^n transforms')
    canonical.add_argument('--enumerate', action='store_true', dest='enumerate_all',
                           help='list every solution')
    canonical.add_argument('file')

    strict = sub.add_parser('strict-canonical', help='2n-query canonical set for strict functions')
    strict.add_argument('--verify', action='store_true', help='replay the full submodularity check')
    strict.add_argument('--trace', action='store_true', help='report oracle call counts')
    strict.add_argument('--pivot', help='element name used as u* (default: the first element)')
    strict.add_argument('file')

    lovasz = sub.add_parser('lovasz', help='evaluate the Lovász extension')
    lovasz.add_argument('file')
    lovasz.add_argument('--point', required=True, help='x1,...,xn as exact decimals or p/q')

    gen = sub.add_parser('gen', help='emit a generator from the function zoo')
    gen.add_argument('kind', choices=sorted(GENERATORS))
    gen.add_argument('--ground', help='comma-joined element names (default 1..n)')
    gen.add_argument('--n', type=int, help='ground-set size for numbered elements')
    gen.add_argument('--parts', help='partition as "1,2;3"')
    gen.add_argument('--set', dest='subset', help='the set U for part-min and min-dip')
    gen.add_argument('--weights', help='modular weights w1,...,wn')
    gen.add_argument('--offset', default='0', help='modular offset')
    gen.add_argument('--edges', default='', help='cut edges as "1-2:1,2-3:1/2"')
    gen.add_argument('--layout', choices=LAYOUTS, default='dense')
    gen.add_argument('-o', '--output')

    demo = sub.add_parser('adversary-demo', help='cardinality adversary against query strategies')
    demo.add_argument('--n', type=int, required=True)
    demo.add_argument('--budget', type=int, required=True)
    demo.add_argument('--strategy', default='all', choices=['all'] + list(strategy_suite()))
    demo.add_argument('--seed', type=int)

    return parser


def _gen_ground(args) -> Optional[GroundSet]:
    if args.ground:
        return GroundSet(tuple(name.strip() for name in args.ground.split(',')))
    if args.n:
        return GroundSet.numbered(args.n)
    return None


def _parse_edges(ground: GroundSet, text: str) -> List[Tuple[int, int, str]]:
    edges = []
    for item in filter(None, (part.strip() for part in text.split(','))):
        ends, _, weight = item.partition(':')
        u, _, v = ends.partition('-')
        edges.append((ground.index(u.strip()), ground.index(v.strip()), weight.strip() or '1'))
    return edges


def generator_spec(args) -> GeneratorSpec:
    params: Dict = {}
    ground = _gen_ground(args)
    if args.kind in ('partition-distance', 'separable-quadratic') and args.parts and ground is None:
        names = [name.strip() for part in args.parts.split(';') for name in part.split(',')]
        ground = GroundSet(tuple(sorted(names, key=lambda name: (len(name), name))))
    if ground is not None:
        params['ground'] = ground
        if args.parts:
            params['parts'] = [ground.parse_subset(part) for part in args.parts.split(';')]
        if args.subset is not None:
            params['set'] = ground.parse_subset(args.subset)
        if args.weights is not None:
            params['weights'] = [w.strip() for w in args.weights.split(',')]
        params['offset'] = args.offset
        params['edges'] = _parse_edges(ground, args.edges)
    if args.n:
        params['n'] = args.n
    return GeneratorSpec(args.kind, params)


def is_negative(report: Dict) -> bool:
    return (report.get('verdict') == 'no' or report.get('status') == 'infeasible'
            or report.get('verified') is False)


def dispatch(args, engine: SetFunctionAnalysisEngine) -> Tuple[Optional[Dict], Optional[str]]:
    """(report, raw document) for one parsed command line"""
    command = args.command
    if command == 'gen':
        f = generator_spec(args).build()
        text = engine.save(f, args.output, args.layout)
        if text is not None:
            return None, text
        return {'generated': f.provenance, 'output': args.output}, None
    if command == 'adversary-demo':
        names = None if args.strategy == 'all' else [args.strategy]
        return engine.adversary(args.n, args.budget, names, args.seed), None

    f, layout = engine.load(args.file)
    if command == 'check':
        return engine.check(f, args.kind, brute=args.brute), None
    if command == 'transform':
        result = engine.transform(f, args.subset)
        engine.save(result['function'], args.output, layout)
        return {'set': result['set'], 'output': args.output}, None
    if command == 'graph':
        return engine.graph(f, witnesses=args.witnesses, matrix=args.matrix), None
    if command == 'decompose':
        return engine.decompose(f), None
    if command == 'canonical':
        return engine.canonical(f, brute=args.brute, enumerate_all=args.enumerate_all), None
    if command == 'strict-canonical':
        return engine.strict_canonical(f, verify=args.verify, trace=args.trace, pivot=args.pivot), None
    if command == 'lovasz':
        return engine.lovasz(f, engine.parse_point(f.ground, args.point)), None
    raise SetFunctionError(f"unhandled command {command!r}")


def attach_option_values(argv: List[str]) -> List[str]:
    """Rewrite `--point -1,2` as `--point=-1,2` so argparse keeps the value"""
    joined = []
    pending = None
    for token in argv:
        if pending is not None:
            joined.append(f"{pending}={token}")
            pending = None
        elif token in RATIONAL_OPTIONS:
            pending = token
        else:
            joined.append(token)
    if pending is not None:
        joined.append(pending)
    return joined


def run(argv: Optional[List[str]] = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    if argv is None:
        argv = sys.argv[1:]
    parser = build_parser()
    try:
        with contextlib.redirect_stdout(stdout), contextlib.redirect_stderr(stderr):
            args = parser.parse_args(attach_option_values(list(argv)))
    except SystemExit as exit_request:
        return EXIT_OK if exit_request.code == 0 else EXIT_ERROR

    try:
        if args.allow_large:
            settings = get_settings()
            guard = max(settings.max_ground_size, LARGE_GROUND_SIZE)
            override_settings(dataclasses.replace(settings, max_ground_size=guard))
        configure_logging(args.verbose)
        engine = SetFunctionAnalysisEngine()
        report, document = dispatch(args, engine)
    except (SetFunctionError, OSError, json.JSONDecodeError) as e:
        logger.error(f"Error in {args.command}: {str(e)}")
        print(f"error: {e}", file=stderr)
        return EXIT_ERROR

    if document is not None:
        stdout.write(document)
        return EXIT_OK
    stdout.write(dump_report(report) + '\n')
    return EXIT_NEGATIVE if is_negative(report) else EXIT_OK


def main() -> int:
    return run(sys.argv[1:])


if __name__ == '__main__':
    sys.exit(main())
