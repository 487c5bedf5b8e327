import importlib.util
import json

import numpy as np
import pytest

from conftest import FIXTURES
from perfcorr.errors import NotHermitian, WorkspaceError
from perfcorr.measurement import von_neumann_model
from perfcorr.spectral import HermitianObservable
from perfcorr.states import QuantumState
from perfcorr.workspace import dump_objects, load_workspace, parse_workspace


@pytest.mark.parametrize('path', sorted(FIXTURES.glob('*.json')), ids=lambda p: p.name)
def test_fixtures_are_valid(path):
    report = load_workspace(path).check_all()
    assert report == {'valid': True, 'errors': []}


def test_names(workspace):
    names = workspace('von_neumann_sz.json').names()
    assert names['observables'] == ['sz']
    assert names['states'] == ['plus', 'up']
    assert names['processes'] == ['cnot']
    assert names['instruments'] == ['sz_projective']
    assert names['povms'] == []


def test_complex_entries(workspace):
    rho = workspace('trine.json').state('rho')
    assert rho.density[0, 1] == pytest.approx(0.2 + 0.1j)
    assert rho.density[1, 0] == pytest.approx(0.2 - 0.1j)


def test_unknown_name(workspace):
    ws = workspace('counterexample.json')
    with pytest.raises(WorkspaceError, match="Unknown observable 'Z'"):
        ws.observable('Z')
    with pytest.raises(WorkspaceError, match='none'):
        ws.povm('trine')


def test_missing_file(tmp_path):
    with pytest.raises(WorkspaceError):
        load_workspace(tmp_path / 'absent.json')


@pytest.mark.parametrize('raw', [
    '{"states": ',
    {'states': {'s': {}}},
    {'states': {'s': {'vector': [1, 0], 'density': [[1, 0], [0, 0]]}}},
    {'observables': {'x': {'matrix': [[1, 0], [0]]}}},
    {'povms': {'p': {'outcomes': [{'effect': [[1]]}]}}},
])
def test_schema_errors(raw):
    with pytest.raises(WorkspaceError):
        parse_workspace(raw)


def test_bad_object_names_itself():
    ws = parse_workspace({'observables': {'skew': {'matrix': [[0, 1], [0, 0]]}}})
    with pytest.raises(NotHermitian, match="observable 'skew'"):
        ws.observable('skew')
    report = ws.check_all()
    assert not report['valid']
    assert report['errors'][0]['name'] == 'skew'
    assert report['errors'][0]['type'] == 'NotHermitian'


def test_probe_dim_must_match():
    ws = parse_workspace({'processes': {'p': {
        'probe_dim': 3,
        'probe_state': [1, 0],
        'interaction': np.eye(4).tolist(),
        'meter': [[1, 0], [0, -1]],
    }}})
    with pytest.raises(WorkspaceError, match='probe_dim'):
        ws.process('p')


def test_dump_objects_loads_back():
    sz = HermitianObservable(np.diag([1.0, -1.0]))
    plus = QuantumState(vector=np.array([1, 1j]) / np.sqrt(2))
    doc = dump_objects(sz=sz, plus=plus, model=von_neumann_model(sz))
    ws = parse_workspace(json.dumps(doc))
    assert np.allclose(ws.observable('sz').matrix, sz.matrix)
    assert np.allclose(ws.state('plus').vector, plus.vector)
    assert ws.process('model').probe_dim == 2
    assert ws.check_all()['valid']


def test_dump_rejects_unknown_objects():
    with pytest.raises(WorkspaceError):
        dump_objects(matrix=np.eye(2))


def test_validate_workspace_script(tmp_path):
    spec = importlib.util.spec_from_file_location(
        'validate_workspace', FIXTURES.parent / 'scripts' / 'validate_workspace.py')
    script = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(script)

    result = script.validate_workspace(FIXTURES / 'bell.json')
    assert result['valid']
    assert result['objects']['observables'] == ['sx_b', 'sz_a', 'sz_b']

    broken = tmp_path / 'broken.json'
    broken.write_text('{"states": {"s": {"vector": [0, 0]}}}')
    result = script.validate_workspace(broken)
    assert not result['valid']
    assert result['errors'][0]['type'] == 'InvalidState'
