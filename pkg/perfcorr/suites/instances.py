"""
Random and fixed instances shared by the suites.

Random observables are built from a Haar unitary and small integer
eigenvalues so that degenerate spectra come up often.
"""
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..linalg_core import (
    ToleranceProfile,
    dagger,
    matrix_to_json,
    psd_sqrt,
    random_density,
    random_povm_effects,
    random_state_vector,
    random_unitary,
    resolve_tol,
    tensor,
)
from ..measurement import Instrument, MeasuringProcess
from ..spectral import HermitianObservable, Povm
from ..states import QuantumState

VALUE_POOL = (-2.0, -1.0, 0.0, 1.0, 2.0)


def observable_from_basis(basis: np.ndarray, values: Sequence[float],
                          tol: Optional[ToleranceProfile] = None) -> HermitianObservable:
    """sum_k values[k] |b_k><b_k| over the columns of ``basis``"""
    return HermitianObservable.from_spectrum(
        [(values[k], np.outer(basis[:, k], np.conj(basis[:, k]))) for k in range(len(values))], tol)


def random_values(rng: np.random.Generator, count: int, pool: Sequence[float] = VALUE_POOL) -> List[float]:
    return [float(v) for v in rng.choice(pool, size=count)]


def random_observable(dim: int, rng: np.random.Generator, tol: Optional[ToleranceProfile] = None,
                      distinct: bool = False) -> HermitianObservable:
    if distinct:
        values = [float(v) for v in rng.permutation(np.arange(dim)) - (dim - 1) / 2.0]
    else:
        values = random_values(rng, dim)
    return observable_from_basis(random_unitary(dim, rng), values, tol)


def random_state(dim: int, rng: np.random.Generator, mixed: Optional[bool] = None,
                 tol: Optional[ToleranceProfile] = None) -> QuantumState:
    if mixed is None:
        mixed = bool(rng.integers(2))
    if mixed:
        rank = int(rng.integers(1, dim + 1))
        return QuantumState(density=random_density(dim, rng, rank), tol=tol)
    return QuantumState(vector=random_state_vector(dim, rng), tol=tol)


def random_povm(dim: int, rng: np.random.Generator, n_outcomes: Optional[int] = None,
                tol: Optional[ToleranceProfile] = None) -> Povm:
    n = int(rng.integers(2, 4)) if n_outcomes is None else n_outcomes
    labels = [float(v) for v in np.sort(rng.choice(VALUE_POOL, size=n, replace=False))]
    return Povm(list(zip(labels, random_povm_effects(dim, n, rng, tol))), tol)


def vector_in(basis: np.ndarray, rng: np.random.Generator, tol: Optional[ToleranceProfile] = None) -> QuantumState:
    """Random unit vector in the span of the given orthonormal columns"""
    v = basis @ random_state_vector(basis.shape[1], rng)
    return QuantumState(vector=v / np.linalg.norm(v), tol=tol)


def state_in(basis: np.ndarray, rng: np.random.Generator, tol: Optional[ToleranceProfile] = None) -> QuantumState:
    """Random density operator supported in the span of the given orthonormal columns"""
    k = basis.shape[1]
    inner = random_density(k, rng, int(rng.integers(1, k + 1)))
    return QuantumState(density=basis @ inner @ dagger(basis), tol=tol)


def engineer_correlated_pair(dim: int, rng: np.random.Generator, subspace_dim: Optional[int] = None,
                             tol: Optional[ToleranceProfile] = None) -> Tuple[HermitianObservable, HermitianObservable, QuantumState, np.ndarray]:
    """
    X and Y sharing eigenvectors and eigenvalues on a random subspace S and
    differing on its complement, plus a state supported in S.

    Returns (x, y, rho, basis of S).
    """
    if dim < 2:
        raise ValueError(f"Engineered pairs need dimension at least 2, got {dim}")
    k = max(1, dim // 2) if subspace_dim is None else subspace_dim
    if not 1 <= k <= dim:
        raise ValueError(f"Subspace dimension {k} out of range for dimension {dim}")
    basis = random_unitary(dim, rng)
    shared = random_values(rng, k)
    x_rest = random_values(rng, dim - k)
    y_rest = [v + 0.5 for v in random_values(rng, dim - k)]

    rest = basis[:, k:]
    rotated = rest @ random_unitary(dim - k, rng) if dim > k else rest
    x = observable_from_basis(basis, shared + x_rest, tol)
    y = observable_from_basis(np.column_stack([basis[:, :k], rotated]), shared + y_rest, tol)
    return x, y, state_in(basis[:, :k], rng, tol), basis[:, :k]


def engineer_compatible_pair(dim: int, rng: np.random.Generator, tol: Optional[ToleranceProfile] = None
                             ) -> Tuple[HermitianObservable, HermitianObservable, QuantumState, np.ndarray]:
    """
    X and Y diagonal in a common basis of a random subspace S, with
    independent values there, and non-commuting on its complement.
    The state is supported in S, so the pair is compatible in it.
    """
    if dim < 2:
        raise ValueError(f"Engineered pairs need dimension at least 2, got {dim}")
    k = max(1, dim // 2)
    basis = random_unitary(dim, rng)
    rest = basis[:, k:]
    rotated = rest @ random_unitary(dim - k, rng)
    x = observable_from_basis(basis, random_values(rng, dim), tol)
    y = observable_from_basis(np.column_stack([basis[:, :k], rotated]), random_values(rng, dim), tol)
    return x, y, state_in(basis[:, :k], rng, tol), basis[:, :k]


def engineer_correlated_povm(dim: int, rng: np.random.Generator, tol: Optional[ToleranceProfile] = None
                             ) -> Tuple[HermitianObservable, Povm, QuantumState]:
    """
    An observable X and a POVM Pi agreeing with E^X on a random subspace S
    and unrelated on its complement, plus a state supported in S.
    """
    if dim < 2:
        raise ValueError(f"Engineered pairs need dimension at least 2, got {dim}")
    k = max(1, dim // 2)
    n = int(rng.integers(2, 4))
    labels = [float(v) for v in np.sort(rng.choice(VALUE_POOL, size=n, replace=False))]
    basis = random_unitary(dim, rng)
    inside, rest = basis[:, :k], basis[:, k:]
    assigned = [labels[i] for i in rng.integers(n, size=k)]
    x = observable_from_basis(basis, assigned + random_values(rng, dim - k, labels), tol)

    outside = random_povm_effects(dim - k, n, rng, tol)
    effects = []
    for a, label in enumerate(labels):
        on_s = sum((np.outer(inside[:, j], np.conj(inside[:, j])) for j in range(k) if assigned[j] == label),
                   np.zeros((dim, dim), dtype=complex))
        effects.append((label, on_s + rest @ outside[a] @ dagger(rest)))
    return x, Povm(effects, tol), state_in(inside, rng, tol)


def random_instrument(dim: int, rng: np.random.Generator, tol: Optional[ToleranceProfile] = None) -> Instrument:
    """K_a = U_a sqrt(Pi_a) for a random POVM, sometimes split in two Kraus operators"""
    tol = resolve_tol(tol)
    povm = random_povm(dim, rng, tol=tol)
    outcomes = []
    for label, effect in povm.outcomes:
        root = psd_sqrt(effect, tol)
        if rng.integers(2):
            share = float(rng.uniform(0.2, 0.8))
            kraus = [np.sqrt(share) * random_unitary(dim, rng) @ root,
                     np.sqrt(1.0 - share) * random_unitary(dim, rng) @ root]
        else:
            kraus = [random_unitary(dim, rng) @ root]
        outcomes.append((label, kraus))
    return Instrument(outcomes, tol)


def random_process(dim: int, rng: np.random.Generator, tol: Optional[ToleranceProfile] = None) -> MeasuringProcess:
    """Random interaction on C^dim (x) C^m, m in {2, 3}, with a random meter and xi = e_0"""
    m = int(rng.integers(2, 4))
    meter = random_observable(m, rng, tol, distinct=True)
    return MeasuringProcess(np.eye(m)[0], random_unitary(dim * m, rng), meter, tol)


# ---------------------------------------------------------------------------
# Fixed instances
# ---------------------------------------------------------------------------

COUNTEREXAMPLE_X = np.array([[1, 1, 0, 0],
                             [1, 1, 0, 0],
                             [0, 0, 1, 1],
                             [0, 0, 1, 0]], dtype=complex)
COUNTEREXAMPLE_Y = np.array([[1, 1, 0, 0],
                             [1, 0, 0, 0],
                             [0, 0, 1, 1],
                             [0, 0, 1, 1]], dtype=complex)


def counterexample(tol: Optional[ToleranceProfile] = None) -> Tuple[HermitianObservable, HermitianObservable, QuantumState]:
    """Unitarily equivalent X, Y with X psi = Y psi for psi = e_1 but different third moments"""
    tol = resolve_tol(tol)
    return (HermitianObservable(COUNTEREXAMPLE_X, tol), HermitianObservable(COUNTEREXAMPLE_Y, tol),
            QuantumState(vector=np.eye(4)[0], tol=tol))


def product_pair(a: Optional[np.ndarray] = None, phi: Optional[np.ndarray] = None,
                 tol: Optional[ToleranceProfile] = None) -> Tuple[HermitianObservable, HermitianObservable, QuantumState]:
    """A (x) I and I (x) A in phi (x) phi: identically distributed, not correlated"""
    tol = resolve_tol(tol)
    a = np.diag([1.0, -1.0]).astype(complex) if a is None else np.asarray(a, dtype=complex)
    d = a.shape[0]
    phi = np.ones(d, dtype=complex) / np.sqrt(d) if phi is None else np.asarray(phi, dtype=complex)
    local = HermitianObservable(a, tol)
    return local.extend(d, 'right'), local.extend(d, 'left'), QuantumState(vector=tensor(phi, phi), tol=tol)


def describe(**objects) -> dict:
    """JSON-ready record of the matrices in a failing instance"""
    out = {}
    for name, obj in objects.items():
        if isinstance(obj, HermitianObservable):
            out[name] = matrix_to_json(obj.matrix)
        elif isinstance(obj, (QuantumState, Povm, MeasuringProcess, Instrument)):
            out[name] = obj.to_json()
        elif isinstance(obj, np.ndarray):
            out[name] = matrix_to_json(obj)
        else:
            out[name] = obj
    return out
