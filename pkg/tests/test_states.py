import numpy as np
import pytest

from perfcorr.errors import DimensionMismatch, InvalidState
from perfcorr.linalg_core import Subspace, random_density, random_unitary
from perfcorr.states import QuantumState


def test_vector_state_requires_unit_norm():
    with pytest.raises(InvalidState):
        QuantumState(vector=[1, 1])
    s = QuantumState(vector=[3, 4], normalize=True)
    assert np.isclose(np.linalg.norm(s.vector), 1.0)
    assert s.is_vector


def test_exactly_one_representation():
    with pytest.raises(InvalidState):
        QuantumState()
    with pytest.raises(InvalidState):
        QuantumState(vector=[1, 0], density=np.eye(2) / 2)


def test_density_validation():
    with pytest.raises(InvalidState):
        QuantumState(density=np.diag([0.7, 0.7]))
    with pytest.raises(InvalidState):
        QuantumState(density=np.diag([1.5, -0.5]))
    with pytest.raises(InvalidState):
        QuantumState(density=np.array([[0.5, 1], [0, 0.5]]))


def test_expectation_matches_trace(rng):
    rho = random_density(3, rng)
    op = random_density(3, rng)
    s = QuantumState(density=rho)
    assert np.isclose(s.expectation(op), np.trace(op @ rho))
    with pytest.raises(DimensionMismatch):
        s.expectation(np.eye(2))


def test_support_of_mixed_state():
    s = QuantumState(density=np.diag([0.5, 0.5, 0.0]))
    support = s.support()
    assert support.dim == 2
    assert support.contains_vector([1, 0, 0]) and not support.contains_vector([0, 0, 1])


def test_uniform_on_subspace():
    s = QuantumState.uniform_on(Subspace.span([[1, 0, 0], [0, 1, 0]]))
    assert np.allclose(s.density, np.diag([0.5, 0.5, 0.0]))
    with pytest.raises(InvalidState):
        QuantumState.uniform_on(Subspace.zero(3))


def test_conjugate_and_tensor(rng):
    u = random_unitary(2, rng)
    s = QuantumState(vector=[1, 0])
    moved = s.conjugate(u)
    assert np.allclose(moved.vector, np.conj(u).T @ [1, 0])
    product = s.tensor(QuantumState(density=np.eye(2) / 2))
    assert not product.is_vector and product.dim == 4


def test_json_preserves_kind():
    s = QuantumState(density=np.eye(2) / 2)
    back = QuantumState.from_json(s.to_json())
    assert not back.is_vector
    assert np.allclose(back.density, s.density)
