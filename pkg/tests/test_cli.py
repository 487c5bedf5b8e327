import json
import math

import pytest

from perfcorr.cli import EXIT_ERROR, EXIT_NO, EXIT_YES, main


@pytest.fixture
def run(capsys, fixture_path):
    """Run the command line on a fixture; returns (exit code, stdout JSON or None, stderr)"""
    def invoke(command, fixture=None, *args):
        argv = [command]
        if fixture:
            argv += ['-w', str(fixture_path(fixture))]
        code = main(argv + list(args))
        captured = capsys.readouterr()
        report = json.loads(captured.out) if captured.out.strip() else None
        return code, report, captured.err
    return invoke


def test_correlate_counterexample(run):
    code, report, err = run('correlate', 'counterexample.json', '--x', 'X', '--y', 'Y', '--state', 'e1')
    assert code == EXIT_NO
    assert not report['verdict']['correlated']
    assert report['verdict']['witness'] is not None
    assert 'not perfectly correlated' in err


def test_correlate_bell(run):
    code, report, err = run('correlate', 'bell.json', '--x', 'sz_a', '--y', 'sz_b', '--state', 'bell')
    assert code == EXIT_YES
    assert report['verdict']['correlated']
    assert all(report['characterizations']['conditions'].values())

    code, _, _ = run('correlate', 'bell.json', '--x', 'sz_a', '--y', 'sx_b', '--state', 'bell')
    assert code == EXIT_NO


def test_correlate_povms(run):
    code, report, _ = run('correlate', 'trine.json', '--x', 'sz', '--y', 'sz', '--state', 'rho', '--povm')
    assert code == EXIT_YES
    code, _, _ = run('correlate', 'trine.json', '--x', 'trine', '--y', 'sz', '--state', 'rho', '--povm')
    assert code == EXIT_NO


def test_domain(run):
    code, report, _ = run('domain', 'bell.json', '--x', 'sz_a', '--y', 'sz_b')
    assert code == EXIT_YES
    assert report['domain']['dim'] == 2
    assert report['domain']['ambient_dim'] == 4


@pytest.mark.parametrize('base,expected', [('e', math.log(2)), ('2', 1.0)])
def test_schmidt(run, base, expected):
    code, report, _ = run('schmidt', 'bell.json', '--state', 'bell', '--dims', '2', '2', '--base', base)
    assert code == EXIT_YES
    assert report['schmidt']['weights'] == pytest.approx([0.5, 0.5])
    assert report['entanglement'] == pytest.approx(expected)


def test_jointdist_is_deterministic(run):
    args = ('--x', 'sz_a', '--y', 'sz_b', '--state', 'bell', '--samples', '200', '--seed', '3')
    code, first, _ = run('jointdist', 'bell.json', *args)
    _, second, _ = run('jointdist', 'bell.json', *args)
    assert code == EXIT_YES
    assert first == second
    assert set(first['successive']) == {'XY', 'YX'}


def test_measure(run):
    code, report, _ = run('measure', 'von_neumann_sz.json', '--process', 'cnot', '--state', 'plus',
                          '--samples', '100')
    assert code == EXIT_YES
    assert [o['probability'] for o in report['outcomes']] == pytest.approx([0.5, 0.5])
    assert sum(t['count'] for t in report['sampled']['tallies']) == 100


def test_vnmodel(run):
    code, report, _ = run('vnmodel', 'von_neumann_sz.json', '--observable', 'sz', '--state', 'plus')
    assert code == EXIT_YES
    assert report['precise']['holds']
    assert 'sz_model' in report['workspace']['processes']


def test_dilate(run):
    code, report, _ = run('dilate', 'trine.json', '--povm1', 'trine')
    assert code == EXIT_YES
    assert 'dilation' in report


def test_verify_and_list(run):
    code, report, _ = run('verify', None, '--suite', 'S3-counterexample', '--trials', '1')
    assert code == EXIT_YES
    assert report['id'] == 'S3-counterexample'
    assert report['passed']

    code, report, _ = run('list-suites')
    assert code == EXIT_YES
    assert any(s['id'] == 'S9-implications' for s in report['suites'])


def test_replay(run, tmp_path):
    record = tmp_path / 'failure.json'
    record.write_text(json.dumps({'suite': 'S3-counterexample', 'seed': 1, 'trial': 0, 'dim': 4}))
    code, report, _ = run('replay', None, '--failure', str(record))
    assert code == EXIT_YES
    assert report == {'reproduced': False}


def test_out_file(run, tmp_path):
    out = tmp_path / 'report.json'
    code, report, _ = run('schmidt', 'bell.json', '--state', 'bell', '--dims', '2', '2', '--out', str(out))
    assert code == EXIT_YES
    assert json.loads(out.read_text()) == report


@pytest.mark.parametrize('argv,error', [
    (['correlate', '-w', 'missing.json', '--x', 'a', '--y', 'b', '--state', 's'], 'WorkspaceError'),
    (['verify', '--suite', 'S0-nothing'], 'UnknownSuite'),
])
def test_errors_exit_with_json(capsys, argv, error):
    assert main(argv) == EXIT_ERROR
    captured = capsys.readouterr()
    assert captured.out == ''
    assert json.loads(captured.err.strip().splitlines()[-1])['type'] == error


def test_unknown_object(run):
    code, report, err = run('correlate', 'bell.json', '--x', 'sz_a', '--y', 'nope', '--state', 'bell')
    assert code == EXIT_ERROR
    assert report is None
    assert 'nope' in err


def test_hardy_needs_observables(run):
    code, _, _ = run('hardy', 'tilted.json', '--state', 'tilted')
    assert code == EXIT_ERROR
