import io
import json

import pytest

from app import EXIT_ERROR, EXIT_NEGATIVE, EXIT_OK, LARGE_GROUND_SIZE, attach_option_values, run
from services.settings import AnalysisSettings, get_settings, override_settings


def sdsub(*argv):
    stdout, stderr = io.StringIO(), io.StringIO()
    code = run(list(argv), stdout=stdout, stderr=stderr)
    return code, stdout.getvalue(), stderr.getvalue()


def report_of(*argv):
    code, out, _ = sdsub(*argv)
    return code, json.loads(out)


@pytest.fixture
def workdir(tmp_path):
    def path(name):
        return str(tmp_path / name)
    return path


class TestGen:
    def test_writes_file(self, workdir):
        code, report = report_of('gen', 'not-clique', '-o', workdir('f.json'))
        assert code == EXIT_OK
        assert report == {'generated': 'not-clique', 'output': workdir('f.json')}
        with open(workdir('f.json'), encoding='utf-8') as handle:
            assert json.load(handle)['values'] == ['0', '1', '1', '1', '1', '2', '1', '1']

    def test_prints_document_without_output(self):
        code, out, _ = sdsub('gen', 'min-dip', '--n', '2', '--set', '1', '--layout', 'sparse')
        assert code == EXIT_OK
        document = json.loads(out)
        assert document['default'] == '0'
        assert document['entries'] == {'1': '1/2', '2': '1', '1,2': '2'}

    def test_missing_parameter(self):
        code, out, err = sdsub('gen', 'part-min', '--n', '3')
        assert code == EXIT_ERROR
        assert out == ''
        assert err.startswith('error:')


GENERATOR_ARGS = [
    ['not-clique'],
    ['figure1-like'],
    ['parity-conflict'],
    ['partition-distance', '--parts', '1,2;3'],
    ['separable-quadratic', '--parts', '1;2,3'],
    ['part-min', '--n', '3', '--set', '1,3'],
    ['min-dip', '--ground', 'a,b,c', '--set', 'b'],
    ['modular', '--n', '3', '--weights', '1,1/2,-3', '--offset', '2'],
    ['quadratic', '--n', '3'],
    ['cut', '--n', '3', '--edges', '1-3:2'],
]


@pytest.mark.parametrize('args', GENERATOR_ARGS, ids=[args[0] for args in GENERATOR_ARGS])
def test_generated_files_reload_identically(workdir, args):
    code, _, _ = sdsub('gen', *args, '-o', workdir('f.json'))
    assert code == EXIT_OK
    sdsub('transform', '--set', '', workdir('f.json'), '-o', workdir('g.json'))
    with open(workdir('f.json'), 'rb') as before, open(workdir('g.json'), 'rb') as after:
        assert before.read() == after.read()


class TestCheck:
    def test_submodular(self, workdir):
        sdsub('gen', 'not-clique', '-o', workdir('f.json'))
        code, report = report_of('check', workdir('f.json'))
        assert code == EXIT_OK
        assert report == {'kind': 'submodular', 'verdict': 'yes', 'faces_scanned': 6}

    def test_violation_has_witness(self, workdir):
        sdsub('gen', 'min-dip', '--n', '3', '--set', '1,2', '-o', workdir('g.json'))
        code, report = report_of('check', '--brute', workdir('g.json'))
        assert code == EXIT_NEGATIVE
        assert report['verdict'] == 'no'
        assert report['pairwise_verdict'] == 'no'
        assert report['witness'] == {'base': ['2'], 'pair': ['1', '3'], 'value': '-1/2'}

    def test_strict_kind(self, workdir):
        sdsub('gen', 'quadratic', '--n', '4', '-o', workdir('q.json'))
        code, report = report_of('check', '--kind', 'strict', workdir('q.json'))
        assert code == EXIT_OK
        assert report['faces_scanned'] == 24


class TestTransform:
    def test_transform_then_check(self, workdir):
        sdsub('gen', 'figure1-like', '-o', workdir('f.json'))
        code, report = report_of('transform', '--set', '1,2', workdir('f.json'), '-o', workdir('g.json'))
        assert code == EXIT_OK
        assert report['set'] == ['1', '2']
        code, report = report_of('check', workdir('g.json'))
        assert code == EXIT_NEGATIVE
        assert report['witness']['pair'] == ['1', '3']
        assert report['witness']['value'] == '-1'

    @pytest.mark.parametrize('layout', ['dense', 'sparse'])
    def test_empty_set_leaves_file_unchanged(self, workdir, layout):
        sdsub('gen', 'cut', '--n', '4', '--edges', '1-2:1,2-3:1/2', '--layout', layout, '-o', workdir('f.json'))
        code, _, _ = sdsub('transform', '--set', '', workdir('f.json'), '-o', workdir('g.json'))
        assert code == EXIT_OK
        with open(workdir('f.json'), 'rb') as before, open(workdir('g.json'), 'rb') as after:
            assert before.read() == after.read()

    def test_unknown_element(self, workdir):
        sdsub('gen', 'not-clique', '-o', workdir('f.json'))
        code, _, err = sdsub('transform', '--set', '4', workdir('f.json'), '-o', workdir('g.json'))
        assert code == EXIT_ERROR
        assert "'4'" in err


class TestGraphAndDecompose:
    def test_graph(self, workdir):
        sdsub('gen', 'not-clique', '-o', workdir('f.json'))
        code, report = report_of('graph', workdir('f.json'))
        assert code == EXIT_OK
        assert report == {'edges': [['1', '2'], ['2', '3']], 'components': [['1', '2', '3']]}

    def test_graph_matrix(self, workdir):
        sdsub('gen', 'figure1-like', '-o', workdir('f.json'))
        _, report = report_of('graph', '--matrix', workdir('f.json'))
        assert len(report['matrix']) == 6
        assert [row['support'] for row in report['matrix']] == [[], [], ['1', '3'], ['1', '3'], [], []]

    def test_decompose(self, workdir):
        sdsub('gen', 'separable-quadratic', '--parts', '1,3;2;4', '-o', workdir('f.json'))
        code, report = report_of('decompose', workdir('f.json'))
        assert code == EXIT_OK
        assert report['parts'] == [['1', '3'], ['2'], ['4']]
        assert report['verified'] is True

    def test_decompose_rejects_non_submodular(self, workdir):
        sdsub('gen', 'parity-conflict', '-o', workdir('f.json'))
        code, _, err = sdsub('decompose', workdir('f.json'))
        assert code == EXIT_ERROR
        assert 'not submodular' in err


class TestCanonical:
    def test_min_dip(self, workdir):
        sdsub('gen', 'min-dip', '--n', '3', '--set', '1,2', '-o', workdir('g.json'))
        code, report = report_of('canonical', '--brute', '--enumerate', workdir('g.json'))
        assert code == EXIT_OK
        assert report['status'] == 'feasible'
        assert report['representative'] == ['3']
        assert report['solutions'] == [['3'], ['1', '2']]
        assert report['brute_force_solutions'] == [['1', '2'], ['3']]
        assert report['brute_force_agrees'] is True

    def test_infeasible(self, workdir):
        sdsub('gen', 'parity-conflict', '-o', workdir('g.json'))
        code, report = report_of('canonical', '--brute', workdir('g.json'))
        assert code == EXIT_NEGATIVE
        assert report['status'] == 'infeasible'
        assert report['conflict']['kind'] == 'pair'
        assert report['brute_force_solutions'] == []
        assert report['brute_force_agrees'] is True

    def test_strict(self, workdir):
        sdsub('gen', 'quadratic', '--n', '4', '-o', workdir('q.json'))
        sdsub('transform', '--set', '2,3', workdir('q.json'), '-o', workdir('g.json'))
        code, report = report_of('strict-canonical', '--trace', '--verify', workdir('g.json'))
        assert code == EXIT_OK
        assert report['canonical'] == ['2', '3']
        assert report['pivot'] == '1'
        assert report['oracle_calls'] == {'distinct': 8, 'total': 8}
        assert report['verified'] is True

    def test_strict_precondition(self, workdir):
        sdsub('gen', 'not-clique', '-o', workdir('f.json'))
        code, _, err = sdsub('strict-canonical', workdir('f.json'))
        assert code == EXIT_ERROR
        assert 'zero slack' in err


class TestLovasz:
    def test_value(self, workdir):
        sdsub('gen', 'not-clique', '-o', workdir('f.json'))
        code, report = report_of('lovasz', workdir('f.json'), '--point', '0.25,0,1')
        assert code == EXIT_OK
        assert report == {'value': '5/4'}

    def test_wrong_dimension(self, workdir):
        sdsub('gen', 'not-clique', '-o', workdir('f.json'))
        code, _, err = sdsub('lovasz', workdir('f.json'), '--point', '1,2')
        assert code == EXIT_ERROR
        assert '--point' in err


class TestAdversaryDemo:
    def test_all_strategies(self):
        code, report = report_of('adversary-demo', '--n', '3', '--budget', '5')
        assert code == EXIT_OK
        assert report['lower_bound'] == 6
        statuses = {run['strategy']: run['status'] for run in report['runs']}
        assert statuses == {
            'empty': 'refuted',
            'prefix': 'refuted',
            'singletons': 'refuted',
            'random': 'refuted',
            'exhaustive': 'budget_exhausted',
        }

    def test_single_strategy(self):
        code, report = report_of('adversary-demo', '--n', '3', '--budget', '6', '--strategy', 'exhaustive')
        assert code == EXIT_OK
        assert [run['status'] for run in report['runs']] == ['not_refutable']


class TestErrors:
    def test_missing_file(self, workdir):
        code, out, err = sdsub('check', workdir('absent.json'))
        assert code == EXIT_ERROR
        assert out == ''
        assert err.startswith('error:')

    def test_malformed_file(self, workdir):
        with open(workdir('bad.json'), 'w', encoding='utf-8') as handle:
            handle.write('{"ground_set": ["a"], "values": [0.5, 1]}')
        code, _, err = sdsub('check', workdir('bad.json'))
        assert code == EXIT_ERROR
        assert err.startswith('error:')

    def test_size_guard(self):
        code, _, err = sdsub('gen', 'quadratic', '--n', '21')
        assert code == EXIT_ERROR
        assert 'size guard' in err

    def test_unknown_command(self):
        assert sdsub('frobnicate')[0] == EXIT_ERROR


class TestOptionValues:
    def test_negative_point(self, workdir):
        sdsub('gen', 'not-clique', '-o', workdir('f.json'))
        code, report = report_of('lovasz', workdir('f.json'), '--point', '-1,0,1')
        assert code == EXIT_OK
        assert report == {'value': '1'}

    def test_negative_weights_and_offset(self):
        code, out, _ = sdsub('gen', 'modular', '--n', '2', '--weights', '-1,2', '--offset', '-1/2')
        assert code == EXIT_OK
        assert json.loads(out)['values'] == ['-1/2', '-3/2', '3/2', '1/2']

    def test_usage_errors_go_to_given_stream(self):
        code, out, err = sdsub('lovasz')
        assert code == EXIT_ERROR
        assert out == ''
        assert 'usage: sdsub' in err

    def test_attach_option_values(self):
        assert attach_option_values(['lovasz', 'f.json', '--point', '-1,0']) == ['lovasz', 'f.json', '--point=-1,0']
        assert attach_option_values(['--point']) == ['--point']


class TestSingleElement:
    def test_canonical_sets_of_one_element(self, workdir):
        sdsub('gen', 'modular', '--n', '1', '--weights', '3', '-o', workdir('f.json'))
        code, report = report_of('canonical', '--brute', '--enumerate', workdir('f.json'))
        assert code == EXIT_OK
        assert report['status'] == 'feasible'
        assert report['solutions'] == [[], ['1']]
        assert report['brute_force_agrees'] is True


class TestAllowLarge:
    def test_raises_default_guard(self):
        sdsub('--allow-large', 'adversary-demo', '--n', '2', '--budget', '2')
        assert get_settings().max_ground_size == LARGE_GROUND_SIZE

    def test_keeps_a_higher_guard(self):
        override_settings(AnalysisSettings(max_ground_size=30))
        sdsub('--allow-large', 'adversary-demo', '--n', '2', '--budget', '2')
        assert get_settings().max_ground_size == 30
