import numpy as np
import pytest
from hypothesis import given, seed, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from perfcorr.errors import DimensionMismatch, InvalidMatrix, NotHermitian
from perfcorr.linalg_core import (
    Subspace,
    ToleranceProfile,
    complete_unitary,
    dagger,
    eig_hermitian,
    is_unitary,
    largest_common_kernel,
    matrix_from_json,
    matrix_to_json,
    partial_trace,
    permute_legs,
    psd_sqrt,
    random_density,
    random_hermitian,
    random_instance,
    random_povm_effects,
    random_unitary,
    tensor,
    unitary_from_isometry,
)

ATOL = 1e-10

dims = st.integers(min_value=1, max_value=6)
seeds = st.integers(min_value=0, max_value=2**32 - 1)


@settings(max_examples=40, deadline=None)
@given(dim=dims, seed=seeds)
def test_eig_hermitian_reconstructs(dim, seed):
    h = random_hermitian(dim, seed)
    values, vectors = eig_hermitian(h)
    assert np.all(np.diff(values) >= 0)
    assert np.allclose(dagger(vectors) @ vectors, np.eye(dim), atol=ATOL)
    assert np.allclose((vectors * values) @ dagger(vectors), h, atol=1e-9)


@settings(max_examples=25, deadline=None)
@given(dim=dims, seed=seeds)
def test_eig_hermitian_phase_convention(dim, seed):
    _, vectors = eig_hermitian(random_hermitian(dim, seed))
    for j in range(dim):
        col = vectors[:, j]
        k = int(np.argmax(np.abs(col)))
        assert abs(col[k].imag) <= 1e-12
        assert col[k].real >= 0


@seed(1)
@settings(max_examples=50, deadline=None)
@given(entries=arrays(np.float64, (4, 4), elements=st.floats(min_value=-10.0, max_value=10.0, allow_subnormal=False)))
def test_eig_hermitian_matches_lapack(entries):
    h = entries + entries.T
    values, vectors = eig_hermitian(h)
    assert np.allclose(values, np.linalg.eigvalsh(h), atol=1e-9)
    assert np.allclose((vectors * values) @ dagger(vectors), h, atol=1e-9)


def test_eig_hermitian_degenerate_block():
    values, vectors = eig_hermitian(np.diag([2.0, 2.0, -1.0]))
    assert np.allclose(values, [-1.0, 2.0, 2.0])
    assert np.allclose(dagger(vectors) @ vectors, np.eye(3), atol=ATOL)


def test_eig_hermitian_rejects_non_hermitian():
    with pytest.raises(NotHermitian):
        eig_hermitian(np.array([[0, 1], [0, 0]]))


def test_as_matrix_rejects_nan():
    with pytest.raises(InvalidMatrix):
        eig_hermitian(np.array([[np.nan, 0], [0, 1]]))


def test_psd_sqrt_squares_back(rng):
    rho = random_density(4, rng)
    root = psd_sqrt(rho)
    assert np.allclose(root @ root, rho, atol=1e-10)


def test_psd_sqrt_rejects_negative():
    with pytest.raises(InvalidMatrix):
        psd_sqrt(np.diag([1.0, -0.5]))


def test_partial_trace_of_product():
    a = random_density(2, 1)
    b = random_density(3, 2)
    ab = tensor(a, b)
    assert np.allclose(partial_trace(ab, (2, 3), 'second'), a, atol=ATOL)
    assert np.allclose(partial_trace(ab, (2, 3), 'first'), b, atol=ATOL)


def test_partial_trace_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        partial_trace(np.eye(5), (2, 3))


def test_permute_legs_swaps_factors():
    a, b = random_hermitian(2, 3), random_hermitian(3, 4)
    assert np.allclose(permute_legs(tensor(a, b), (2, 3), (1, 0)), tensor(b, a), atol=ATOL)


def test_largest_common_kernel_of_commutator():
    x = np.diag([1.0, 1.0, 2.0])
    y = np.diag([1.0, 3.0, 2.0])
    kernel = largest_common_kernel([x - y])
    assert kernel.dim == 2
    assert kernel.contains_vector([1, 0, 0])
    assert kernel.contains_vector([0, 0, 1])
    assert not kernel.contains_vector([0, 1, 0])


def test_largest_common_kernel_of_round_off_is_everything():
    assert largest_common_kernel([1e-17 * np.eye(3)]).dim == 3
    assert largest_common_kernel([1e-17 * np.eye(3), np.diag([0.0, 0.0, 1.0])]).dim == 2


def test_subspace_operations():
    ab = Subspace.span([[1, 0, 0], [0, 1, 0]])
    bc = Subspace.span([[0, 1, 0], [0, 0, 1]])
    meet = ab.intersect(bc)
    assert meet.dim == 1
    assert meet.equals(Subspace.span([[0, 1, 0]]))
    assert ab.complement().equals(Subspace.span([[0, 0, 1]]))
    assert ab.is_invariant_under(np.diag([1.0, 2.0, 3.0]))
    assert not ab.is_invariant_under(np.ones((3, 3)))
    assert Subspace.zero(3).dim == 0 and Subspace.full(3).dim == 3


def test_complete_unitary_is_deterministic():
    col = np.array([[1.0], [1.0], [0.0]], dtype=complex) / np.sqrt(2)
    u = complete_unitary(col)
    assert is_unitary(u)
    assert np.allclose(u[:, 0], col[:, 0])
    assert np.array_equal(u, complete_unitary(col))


def test_unitary_from_isometry_fixes_probe_columns():
    v = np.kron(np.eye(2), np.array([[0.0], [1.0]]))
    w = unitary_from_isometry(v, 2)
    assert is_unitary(w)
    for i in range(2):
        e = np.zeros(2)
        e[i] = 1
        assert np.allclose(w @ tensor(e, [1, 0]), v @ e)


def test_random_instances_are_valid(rng):
    assert is_unitary(random_unitary(4, rng))
    rho = random_density(3, rng)
    assert abs(np.trace(rho) - 1) < 1e-12
    assert np.min(np.linalg.eigvalsh(rho)) > -1e-12
    effects = random_povm_effects(3, 4, rng)
    assert np.allclose(sum(effects), np.eye(3), atol=1e-10)
    with pytest.raises(ValueError):
        random_instance('tensor', 2)


def test_random_instance_is_seeded():
    assert np.array_equal(random_instance('unitary', 3, seed=5), random_instance('unitary', 3, seed=5))


def test_tolerance_profile_validation():
    with pytest.raises(ValueError):
        ToleranceProfile(tol_zero=0.0)
    with pytest.raises(ValueError):
        ToleranceProfile(tol_input=1e-6, tol_cluster=1e-8)


def test_matrix_json_accepts_real_and_pairs():
    m = matrix_from_json([[1, [0, 2]], [[0, -2], 3]])
    assert m[0, 1] == 2j and m[1, 0] == -2j
    assert matrix_to_json(m)[0][1] == [0.0, 2.0]
