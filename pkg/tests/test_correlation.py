import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from perfcorr.correlation import (
    check_equivalences_mixed,
    check_equivalences_vector,
    condition_taxonomy,
    cyclic_projector,
    domain_transitivity,
    function_transport,
    identically_distributed,
    is_perfectly_correlated,
    perfectly_correlative_domain,
    proposition_conditions,
    superposition_certificate,
    unitary_transport,
)
from perfcorr.errors import DimensionMismatch, InvalidState
from perfcorr.linalg_core import random_unitary
from perfcorr.spectral import HermitianObservable, RealFunction, moment
from perfcorr.states import QuantumState
from perfcorr.suites.instances import counterexample, engineer_correlated_pair, product_pair

seeds = st.integers(min_value=0, max_value=10**6)
dims = st.integers(min_value=2, max_value=5)


def test_counterexample_third_moments():
    x, y, psi = counterexample()
    assert abs(moment(x, psi, 3) - 4.0) <= 1e-12
    assert abs(moment(y, psi, 3) - 3.0) <= 1e-12
    assert np.linalg.norm(psi.act(x.matrix) - psi.act(y.matrix)) <= 1e-12


def test_counterexample_not_correlated():
    x, y, psi = counterexample()
    verdict = is_perfectly_correlated(x, y, psi)
    assert not verdict.correlated
    assert verdict.witness is not None and verdict.witness.magnitude > 1e-3
    full = check_equivalences_vector(x, y, psi)
    assert not any(full.conditions.values())


def test_bell_state_correlated(bell_pair):
    sz_a, sz_b, sx_b, bell = bell_pair
    verdict = check_equivalences_vector(sz_a, sz_b, bell)
    assert verdict.correlated and verdict.witness is None
    assert all(verdict.conditions.values())
    assert np.allclose(cyclic_projector(sz_a, bell), np.diag([1, 0, 0, 1]), atol=1e-10)
    assert not is_perfectly_correlated(sz_a, sx_b, bell).correlated


def test_correlated_with_itself():
    x = HermitianObservable.diagonal([1.0, 2.0, 2.0])
    s = QuantumState(density=np.diag([0.2, 0.3, 0.5]))
    assert is_perfectly_correlated(x, x, s).correlated


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        is_perfectly_correlated(HermitianObservable.diagonal([1.0, 0.0]),
                                HermitianObservable.diagonal([1.0, 0.0, 0.0]),
                                QuantumState(vector=[1, 0]))
    x = HermitianObservable.diagonal([1.0, 0.0])
    with pytest.raises(InvalidState):
        check_equivalences_vector(x, x, QuantumState(density=np.eye(2) / 2))


@settings(max_examples=30, deadline=None)
@given(dim=dims, seed=seeds)
def test_engineered_pairs_pass_every_characterization(dim, seed):
    rng = np.random.default_rng(seed)
    x, y, rho, _ = engineer_correlated_pair(dim, rng)
    verdict = check_equivalences_mixed(x, y, rho)
    assert verdict.correlated
    assert verdict.all_agree


@settings(max_examples=30, deadline=None)
@given(dim=dims, seed=seeds)
def test_characterizations_agree_on_random_pairs(dim, seed):
    rng = np.random.default_rng(seed)
    x = HermitianObservable(np.diag(rng.integers(-2, 3, dim)).astype(complex))
    u = random_unitary(dim, rng)
    y = x.conjugate(u)
    psi = QuantumState(vector=rng.normal(size=dim) + 1j * rng.normal(size=dim), normalize=True)
    assert check_equivalences_vector(x, y, psi).all_agree
    assert check_equivalences_mixed(x, y, psi).all_agree


def test_domain_of_diagonal_pair():
    x = HermitianObservable.diagonal([1.0, 2.0, 3.0])
    y = HermitianObservable.diagonal([1.0, 2.0, 0.0])
    domain = perfectly_correlative_domain(x, y)
    assert domain.dim == 2
    assert domain.contains_vector([1, 1, 0]) and not domain.contains_vector([0, 0, 1])


def test_domain_transitivity(rng):
    x, y, _, _ = engineer_correlated_pair(4, rng)
    assert domain_transitivity(x, y, x)
    assert domain_transitivity(x, x, y)


def test_superposition_certificate(bell_pair):
    sz_a, sz_b, sx_b, bell = bell_pair
    components = superposition_certificate(sz_a, sz_b, bell)
    assert [v for v, _ in components] == [-1.0, 1.0]
    assert np.allclose(sum(c for _, c in components), bell.vector)
    assert superposition_certificate(sz_a, sx_b, bell) is None


def test_identical_distribution_without_correlation():
    x, y, psi = product_pair()
    assert identically_distributed(x, y, psi)
    assert not is_perfectly_correlated(x, y, psi).correlated


def test_proposition_conditions_agree(rng):
    x, y, rho, _ = engineer_correlated_pair(3, rng)
    verdict = proposition_conditions(x, y, rho)
    assert verdict.correlated and all(verdict.conditions.values())
    x, y, psi = counterexample()
    verdict = proposition_conditions(x, y, psi)
    assert not any(verdict.conditions.values())


def test_transport_preserves_correlation(rng):
    x, y, rho, _ = engineer_correlated_pair(4, rng)
    assert unitary_transport(x, y, rho, random_unitary(4, rng)) == (True, True)
    assert function_transport(x, y, rho, RealFunction.power(2)) == (True, True)
    assert function_transport(x, y, rho, RealFunction.named('arctan')) == (True, True)


def test_condition_taxonomy_counterexample():
    x, y, psi = counterexample()
    report = condition_taxonomy(x, y, psi)
    c = report.conditions
    assert c['iii'] and not c['i'] and not c['iv']
    assert c['i'] == c['ii'] == c['iii_cyclic'] == c['iv_cyclic']
    assert 'witness' in report.details


def test_condition_taxonomy_product_pair():
    x, y, psi = product_pair()
    report = condition_taxonomy(x, y, psi)
    c = report.conditions
    assert c['iv'] and not c['i'] and not c['iii']
    assert abs(report.residuals['i'] - 0.25) <= 1e-12
