import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from perfcorr.bipartite import (
    HARDY_POSITIVE,
    bipartite_pc_characterize,
    binary_observable,
    entanglement,
    hardy_check,
    hardy_construction,
    hardy_probabilities,
    hardy_search,
    maximally_entangled_state,
    reduced_states,
    schmidt,
    schmidt_observables,
    von_neumann_entropy,
)
from perfcorr.errors import DimensionMismatch, InvalidState, SpectrumNotBinary
from perfcorr.linalg_core import random_state_vector, random_unitary
from perfcorr.models import HardyVerdict
from perfcorr.spectral import HermitianObservable
from perfcorr.states import QuantumState

from conftest import BELL

TILTED = np.array([math.sqrt(0.7), 0, 0, math.sqrt(0.3)], dtype=complex)
SIGMA_Z = HermitianObservable.diagonal([1.0, -1.0])
SIGMA_X = HermitianObservable(np.array([[0, 1], [1, 0]]))


def test_bell_state_is_maximally_entangled():
    decomposition = schmidt(BELL, (2, 2))
    assert np.allclose(decomposition.weights, [0.5, 0.5], atol=1e-12)
    assert abs(entanglement(BELL, (2, 2)) - math.log(2)) <= 1e-12
    assert abs(entanglement(BELL, (2, 2), base='2') - 1.0) <= 1e-12
    rho1, rho2 = reduced_states(BELL, (2, 2))
    assert np.allclose(rho1, np.eye(2) / 2, atol=1e-12)
    assert np.allclose(rho2, np.eye(2) / 2, atol=1e-12)
    assert abs(von_neumann_entropy(rho1) - math.log(2)) <= 1e-12


def test_product_state_has_rank_one():
    psi = np.kron([1, 0], [0.6, 0.8]).astype(complex)
    decomposition = schmidt(psi, (2, 2))
    assert decomposition.rank == 1
    assert entanglement(psi, (2, 2)) == 0.0


@settings(max_examples=30, deadline=None)
@given(d1=st.integers(min_value=1, max_value=4), d2=st.integers(min_value=1, max_value=4),
       seed=st.integers(min_value=0, max_value=10**6))
def test_schmidt_reconstructs(d1, d2, seed):
    psi = random_state_vector(d1 * d2, seed)
    decomposition = schmidt(psi, (d1, d2))
    assert np.allclose(decomposition.reconstruct(), psi, atol=1e-10)
    assert abs(decomposition.weights.sum() - 1.0) <= 1e-10
    assert np.all(np.diff(decomposition.weights) <= 1e-15)
    rho1, _ = reduced_states(psi, (d1, d2))
    assert abs(von_neumann_entropy(rho1) - decomposition.entropy()) <= 1e-7


@pytest.mark.parametrize('dims', [(2, 3), (3, 2), (1, 4), (4, 1)])
def test_schmidt_of_unequal_factors(dims):
    psi = random_state_vector(dims[0] * dims[1], 17)
    decomposition = schmidt(psi, dims)
    assert decomposition.rank == min(dims)
    assert decomposition.left.shape == (dims[0], decomposition.rank)
    assert decomposition.right.shape == (dims[1], decomposition.rank)
    assert np.allclose(decomposition.reconstruct(), psi, atol=1e-10)


def test_schmidt_rejects_bad_input():
    with pytest.raises(DimensionMismatch):
        schmidt(BELL, (2, 3))
    with pytest.raises(InvalidState):
        schmidt(QuantumState(density=np.eye(4) / 4), (2, 2))


def test_schmidt_observables_are_correlated():
    psi = random_state_vector(6, 9)
    decomposition = schmidt(psi, (2, 3))
    x, y = schmidt_observables(decomposition, [1.0, 2.0][:decomposition.rank])
    certificate = bipartite_pc_characterize(x, y, psi, (2, 3))
    assert certificate is not None
    assert np.allclose(certificate.reconstruct(), psi, atol=1e-9)


def test_bell_certificate():
    certificate = bipartite_pc_characterize(SIGMA_Z, SIGMA_Z, BELL, (2, 2))
    assert sorted(certificate.values) == [-1.0, 1.0]
    assert np.allclose(certificate.weights, [0.5, 0.5])
    for j, value in enumerate(certificate.values):
        phi, xi = certificate.left[:, j], certificate.right[:, j]
        assert np.allclose(SIGMA_Z.matrix @ phi, value * phi)
        assert np.allclose(SIGMA_Z.matrix @ xi, value * xi)
    assert bipartite_pc_characterize(SIGMA_Z, SIGMA_X, BELL, (2, 2)) is None


def test_maximally_entangled_state_with_local_unitary():
    psi = maximally_entangled_state(3, random_unitary(3, 4))
    assert np.allclose(schmidt(psi, (3, 3)).weights, [1 / 3] * 3, atol=1e-12)


def test_hardy_search_on_tilted_state():
    found = hardy_search(TILTED, resolution=32, seed=1)
    assert found is not None
    values = hardy_probabilities(TILTED, *found)
    assert max(values[:3]) <= 1e-9
    assert values[3] >= HARDY_POSITIVE
    report = hardy_check(TILTED, found.u1, found.d1, found.u2, found.d2)
    assert report.verdict == HardyVerdict.NONLOCALITY_WITNESSED
    assert abs(report.p1 - 0.7) <= 1e-12


def test_hardy_fails_for_maximal_entanglement():
    assert hardy_search(BELL, resolution=8) is None
    found = hardy_construction(BELL, 1.1, 0.4)
    values = hardy_probabilities(BELL, *found)
    assert values[3] <= 1e-9
    report = hardy_check(BELL, found.u1, found.d1, found.u2, found.d2)
    assert report.verdict == HardyVerdict.BLOCKED_BY_TRANSITIVITY
    assert report.correlation_chain == [['U1', 'U2'], ['U1', 'D2'], ['D1', 'U2'], ['D1', 'D2']]


def test_hardy_product_state_and_spectrum_checks():
    u, d = binary_observable(0.3, 0.0), binary_observable(1.2, 0.5)
    product = np.kron([1, 0], [0, 1]).astype(complex)
    assert hardy_check(product, u, d).verdict == HardyVerdict.PRODUCT_STATE
    with pytest.raises(SpectrumNotBinary):
        hardy_check(TILTED, SIGMA_Z, d)
    with pytest.raises(DimensionMismatch):
        hardy_check(np.ones(8) / math.sqrt(8), u, d)
