import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from perfcorr.errors import IncompatiblePair
from perfcorr.joint_dist import (
    characteristic_functions,
    commutative_domain,
    compatibility_conditions,
    diagonal_concentration,
    joint_distribution,
    joint_measurability_check,
    phi_function,
    psi_shift_residual,
    successive_measurement,
)
from perfcorr.linalg_core import dagger, random_density, random_unitary
from perfcorr.models import MeasurementOrder
from perfcorr.spectral import HermitianObservable
from perfcorr.states import QuantumState
from perfcorr.suites.instances import engineer_compatible_pair

SIGMA_Z = HermitianObservable.diagonal([1.0, -1.0])
SIGMA_X = HermitianObservable(np.array([[0, 1], [1, 0]]))
SAMPLES = 4000


def _cell(record, x, y):
    return next(c for c in record.cells if c.x == x and c.y == y)


def test_product_marginal_distribution(bell_pair):
    sz_a, _, sx_b, bell = bell_pair
    record = joint_distribution(sz_a, sx_b, bell)
    assert record.present
    assert len(record.cells) == 4
    for cell in record.cells:
        assert abs(cell.p - 0.25) <= 1e-12
        assert abs(cell.meet - cell.p) <= 1e-10


def test_diagonal_concentration(bell_pair):
    sz_a, sz_b, sx_b, bell = bell_pair
    assert diagonal_concentration(sz_a, sz_b, bell) == (True, pytest.approx(0.0, abs=1e-12))
    concentrated, mass = diagonal_concentration(sz_a, sx_b, bell)
    assert not concentrated and abs(mass - 0.5) <= 1e-12
    record = joint_distribution(sz_a, sz_b, bell)
    assert abs(_cell(record, 1.0, -1.0).p) <= 1e-12


def test_incompatible_pair_has_no_distribution():
    up = QuantumState(vector=[1, 0])
    assert commutative_domain(SIGMA_Z, SIGMA_X).dim == 0
    record = joint_distribution(SIGMA_Z, SIGMA_X, up)
    assert not record.present
    assert record.commutator_residual > 0.1
    assert record.violation.magnitude <= 1e-12
    report = compatibility_conditions(SIGMA_Z, SIGMA_X, up)
    assert not report.holds and report.all_agree
    with pytest.raises(IncompatiblePair):
        joint_measurability_check(SIGMA_Z, SIGMA_X, up)
    assert diagonal_concentration(SIGMA_Z, SIGMA_X, up) == (False, None)


def test_missing_distribution_reports_imaginary_mass():
    plus_i = QuantumState(vector=np.array([1, 1j]) / np.sqrt(2))
    record = joint_distribution(SIGMA_Z, SIGMA_X, plus_i)
    assert not record.present
    assert abs(record.violation.magnitude - 0.25) <= 1e-12
    _, im = record.violation_value
    assert abs(abs(im) - 0.25) <= 1e-12
    assert record.cells == []


@pytest.mark.parametrize('seed', [3, 7, 11])
def test_pair_commuting_in_rotated_basis(seed):
    u = random_unitary(4, seed)
    x = HermitianObservable(u @ np.diag([1.0, 1.0, -1.0, -1.0]) @ dagger(u))
    y = HermitianObservable(u @ np.diag([1.0, -1.0, 1.0, -1.0]) @ dagger(u))
    assert commutative_domain(x, y).dim == 4
    rho = QuantumState(density=random_density(4, seed))
    record = joint_distribution(x, y, rho)
    assert record.present
    assert record.violation is None
    assert abs(sum(c.p for c in record.cells) - 1.0) <= 1e-9
    assert compatibility_conditions(x, y, rho).holds


@pytest.mark.parametrize('seed', range(5))
def test_certain_outcomes_keep_finite_stderr(seed):
    u = random_unitary(3, seed)
    x = HermitianObservable(u @ np.diag([-2.0, 0.0, 1.0]) @ dagger(u))
    eigenstate = QuantumState(vector=u[:, 0])
    for order in MeasurementOrder:
        run = successive_measurement(x, x, eigenstate, order, 200, seed=seed)
        assert run.all_equal
        for tally in run.pair_tallies:
            assert 0.0 <= tally.probability <= 1.0
            assert np.isfinite(tally.stderr)
            assert abs(tally.frequency - tally.probability) <= 5 * tally.stderr + 1e-9



@settings(max_examples=25, deadline=None)
@given(dim=st.integers(min_value=2, max_value=5), seed=st.integers(min_value=0, max_value=10**6))
def test_compatible_pairs_have_valid_distributions(dim, seed):
    x, y, rho, _ = engineer_compatible_pair(dim, np.random.default_rng(seed))
    report = compatibility_conditions(x, y, rho)
    assert report.holds and report.all_agree
    record = joint_distribution(x, y, rho)
    assert abs(sum(c.p for c in record.cells) - 1.0) <= 1e-9
    measurable, residual = joint_measurability_check(x, y, rho)
    assert measurable, residual


def test_successive_measurement_of_correlated_pair(bell_pair):
    sz_a, sz_b, _, bell = bell_pair
    for order in MeasurementOrder:
        run = successive_measurement(sz_a, sz_b, bell, order, SAMPLES, seed=3)
        assert run.all_equal
        assert sum(t.count for t in run.pair_tallies) == SAMPLES


def test_successive_frequencies_track_probabilities(bell_pair):
    sz_a, _, sx_b, bell = bell_pair
    run = successive_measurement(sz_a, sx_b, bell, 'YX', SAMPLES, seed=11)
    assert not run.all_equal
    for tally in run.pair_tallies:
        assert abs(tally.frequency - tally.probability) <= 5 * tally.stderr + 1e-9


def test_successive_measurement_is_seeded(bell_pair):
    sz_a, _, sx_b, bell = bell_pair
    first = successive_measurement(sz_a, sx_b, bell, 'XY', 500, seed=42)
    again = successive_measurement(sz_a, sx_b, bell, 'XY', 500, seed=42)
    assert first.to_json() == again.to_json()


def test_characteristic_functions_of_correlated_pair(bell_pair):
    sz_a, sz_b, sx_b, bell = bell_pair
    assert psi_shift_residual(sz_a, sz_b, bell) <= 1e-10
    assert psi_shift_residual(sz_a, sx_b, bell) > 1e-3
    ts = np.linspace(-3, 3, 13)
    along_x = phi_function(sz_a, sz_b, bell.vector, [(t, 0.0, 1.0) for t in ts])
    along_y = phi_function(sz_a, sz_b, bell.vector, [(0.0, t, 1.0) for t in ts])
    assert np.allclose(along_x, along_y, atol=1e-12)


def test_phi_equals_psi_on_axes(rng):
    x = HermitianObservable.diagonal([1.0, 2.0, -1.0])
    y = HermitianObservable(np.array([[0, 1, 0], [1, 0, 0], [0, 0, 3]]))
    psi = QuantumState(vector=rng.normal(size=3) + 1j * rng.normal(size=3), normalize=True)
    grid = [(t, 0.0, 1.0) for t in (-1.0, 0.5, 2.0)] + [(0.0, t, 1.0) for t in (-2.0, 1.5)]
    sample = characteristic_functions(x, y, psi, grid)
    assert np.allclose(sample.phi_values, sample.psi_values, atol=1e-10)
    assert len(sample.to_json()['psi']) == len(grid)
