import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from perfcorr.errors import DegenerateSpectrum, DimensionMismatch, InvalidMatrix, LabelMismatch
from perfcorr.measurement import (
    Instrument,
    MeasuringProcess,
    instrument_of,
    measure,
    model_characterization,
    nondemolition,
    povm_of,
    precisely_measures,
    realize_instrument,
    repeatability_trial,
    sample_measurements,
    statistically_equivalent,
    two_of_three,
    von_neumann_model,
)
from perfcorr.spectral import HermitianObservable
from perfcorr.states import QuantumState
from perfcorr.suites.instances import random_instrument, random_observable, random_state

seeds = st.integers(min_value=0, max_value=10**6)
dims = st.integers(min_value=2, max_value=4)


@pytest.fixture
def sz_process(workspace):
    ws = workspace('von_neumann_sz.json')
    return ws, ws.process('cnot'), ws.observable('sz')


def test_cnot_outcomes(sz_process):
    ws, mp, _ = sz_process
    records = {r.label: r for r in measure(mp, ws.state('plus'), ws.tol)}
    assert set(records) == {1.0, -1.0}
    assert abs(records[1.0].probability - 0.5) <= 1e-12
    assert abs(records[-1.0].probability - 0.5) <= 1e-12
    assert np.allclose(records[1.0].conditional_state.density, np.diag([1, 0]), atol=1e-12)
    assert np.allclose(records[-1.0].conditional_state.density, np.diag([0, 1]), atol=1e-12)


def test_impossible_outcome_has_no_state(sz_process):
    ws, mp, _ = sz_process
    records = {r.label: r for r in measure(mp, ws.state('up'), ws.tol)}
    assert records[-1.0].probability <= 1e-12
    assert records[-1.0].conditional_state is None


def test_cnot_instrument_is_projective(sz_process):
    ws, mp, sz = sz_process
    assert statistically_equivalent(mp, ws.instrument('sz_projective'), ws.tol)
    povm = povm_of(instrument_of(mp, ws.tol))
    assert np.allclose(povm.effect_at(1.0), sz.projector_at(1.0), atol=1e-12)


def test_cnot_precisely_measures_sz(sz_process):
    ws, mp, sz = sz_process
    report = precisely_measures(mp, sz, ws.state('plus'), ws.tol)
    assert report.holds
    assert report.all_agree
    assert report.details['bsf_on_state']
    assert nondemolition(mp, sz, ws.state('plus'), ws.tol).correlated


def test_cnot_is_repeatable(sz_process):
    ws, mp, _ = sz_process
    run = repeatability_trial(mp, ws.state('plus'), 200, seed=3, tol=ws.tol)
    assert run.all_equal
    assert sum(t.count for t in run.pair_tallies) == 200
    assert all(t.x == t.y for t in run.pair_tallies)


def test_certain_outcome_has_finite_stderr(sz_process):
    ws, mp, _ = sz_process
    records = measure(mp, ws.state('up'), ws.tol)
    assert all(0.0 <= r.probability <= 1.0 for r in records)
    run = repeatability_trial(mp, ws.state('up'), 100, seed=1, tol=ws.tol)
    assert run.all_equal
    for tally in run.pair_tallies:
        assert np.isfinite(tally.stderr)
    sampled = sample_measurements(mp, ws.state('up'), 100, seed=1, tol=ws.tol)
    assert all(np.isfinite(t.stderr) for t in sampled.tallies)


def test_sampling_is_seeded(sz_process):
    ws, mp, _ = sz_process
    first = sample_measurements(mp, ws.state('plus'), 500, seed=11, tol=ws.tol)
    second = sample_measurements(mp, ws.state('plus'), 500, seed=11, tol=ws.tol)
    assert first.to_json() == second.to_json()
    assert sum(t.count for t in first.tallies) == 500
    for t in first.tallies:
        assert abs(t.frequency - t.probability) <= 5 * t.stderr


@settings(max_examples=15, deadline=None)
@given(dim=dims, seed=seeds)
def test_model_characterization(dim, seed):
    rng = np.random.default_rng(seed)
    a = random_observable(dim, rng, distinct=True)
    phases = list(np.exp(2j * np.pi * rng.random(dim)))
    mp = von_neumann_model(a, phases)
    report = model_characterization(mp, a, seed=seed)
    assert report.holds
    assert report.conditions['slice']
    assert report.details['nondemolition']
    found = [complex(re, im) for re, im in report.details['phases']]
    assert np.allclose(found, phases, atol=1e-9)


@settings(max_examples=15, deadline=None)
@given(dim=dims, seed=seeds)
def test_model_satisfies_two_of_three(dim, seed):
    rng = np.random.default_rng(seed)
    a = random_observable(dim, rng, distinct=True)
    rho = random_state(dim, rng)
    report = two_of_three(von_neumann_model(a), a, rho)
    assert report.holds
    assert all(report.conditions.values())


def test_idle_interaction_is_not_a_model():
    a = HermitianObservable.diagonal([1.0, 2.0, 3.0])
    model = von_neumann_model(a)
    idle = MeasuringProcess(model.probe_state, np.eye(9), model.meter)
    report = model_characterization(idle, a, seed=4)
    assert not report.holds
    assert not report.conditions['slice']


def test_phase_choice_does_not_change_instrument():
    a = HermitianObservable.diagonal([-1.0, 0.0, 1.0])
    flipped = von_neumann_model(a, [1.0, -1.0, 1j])
    assert statistically_equivalent(von_neumann_model(a), flipped)


@settings(max_examples=15, deadline=None)
@given(dim=st.integers(min_value=1, max_value=3), seed=seeds)
def test_realized_instrument_is_equivalent(dim, seed):
    instrument = random_instrument(dim, np.random.default_rng(seed))
    realized = realize_instrument(instrument)
    assert statistically_equivalent(realized, instrument)
    assert statistically_equivalent(instrument_of(realized), instrument)


def test_apparatus_for_other_register():
    local = HermitianObservable.diagonal([1.0, -1.0])
    sigma = np.diag([0.7, 0.3])
    rho = QuantumState(density=np.kron(sigma, sigma))
    b = local.extend(2, 'left')
    mp = realize_instrument(Instrument([(v, [p]) for v, p in b.spectrum]))
    report = precisely_measures(mp, local.extend(2, 'right'), rho)
    assert report.details['bsf_on_state']
    assert not report.conditions['a']
    assert not report.conditions['b']
    assert report.all_agree


def test_degenerate_observable_has_no_model():
    with pytest.raises(DegenerateSpectrum):
        von_neumann_model(HermitianObservable(np.diag([1.0, 1.0, 2.0])))


def test_instrument_validation():
    with pytest.raises(InvalidMatrix):
        Instrument([(1.0, [np.eye(2)]), (-1.0, [np.eye(2)])])
    with pytest.raises(LabelMismatch):
        Instrument([(1.0, [np.diag([1, 0])]), (1.0, [np.diag([0, 1])])])


def test_process_validation():
    with pytest.raises(InvalidMatrix):
        MeasuringProcess([1, 0], 2 * np.eye(4), np.diag([1.0, -1.0]))
    with pytest.raises(DimensionMismatch):
        MeasuringProcess([1, 0, 0], np.eye(4), np.diag([1.0, -1.0, 0.0]))


def test_model_repeats_over_ten_thousand_shots():
    rng = np.random.default_rng(5)
    a = random_observable(3, rng, distinct=True)
    rho = random_state(3, rng)
    mp = von_neumann_model(a, list(np.exp(2j * np.pi * rng.random(3))))
    for record in measure(mp, rho):
        born = rho.expectation(a.projector_at(record.label)).real
        assert abs(record.probability - born) <= 1e-12
    run = repeatability_trial(mp, rho, 10_000, seed=9)
    assert run.all_equal
    assert sum(t.count for t in run.pair_tallies) == 10_000


def test_model_with_meter_labels():
    a = HermitianObservable.diagonal([-1.0, 0.5, 2.0])
    model = von_neumann_model(a)
    meter = HermitianObservable.from_spectrum(
        [(10.0 + n, model.meter.projector_at(v)) for n, v in enumerate(a.values)])
    mp = MeasuringProcess(model.probe_state, model.interaction, meter)

    unlabeled = model_characterization(mp, a, seed=2)
    assert not unlabeled.holds
    assert not unlabeled.conditions['slice']

    report = model_characterization(mp, a, [10.0, 11.0, 12.0], seed=2)
    assert report.holds
    assert report.conditions['slice']
    assert report.details['labels'] == [10.0, 11.0, 12.0]

    swapped = model_characterization(mp, a, [11.0, 10.0, 12.0], seed=2)
    assert not swapped.holds

    with pytest.raises(LabelMismatch):
        model_characterization(mp, a, [10.0, 11.0])
