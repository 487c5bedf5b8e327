"""
Dense complex linear algebra used by every other module.

Matrices are plain ``numpy`` arrays of dtype complex128. Operators on a
tensor product follow the Kronecker convention: the basis vector of
``H1 (x) H2`` with component indices (i1, i2) sits at row ``i1 * d2 + i2``.
"""
import logging
import math
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, validator

from . import config
from .errors import (
    DimensionMismatch,
    InvalidMatrix,
    NoConvergence,
    NotHermitian,
    SingularNormalizer,
)

logger = logging.getLogger(__name__)

MACHINE_EPS = float(np.finfo(float).eps)

RngLike = Union[None, int, np.random.Generator]


class ToleranceProfile(BaseModel):
    """Numerical tolerances threaded through every decision procedure"""
    tol_input: float = config.TOL_INPUT
    tol_cluster: float = config.TOL_CLUSTER
    tol_zero: float = config.TOL_ZERO
    tol_prob: float = config.TOL_PROB
    tol_ortho: float = config.TOL_ORTHO

    @validator('tol_input', 'tol_cluster', 'tol_zero', 'tol_prob', 'tol_ortho')
    def _positive(cls, value):
        if not value > 0:
            raise ValueError('tolerances must be strictly positive')
        return value

    @validator('tol_cluster')
    def _cluster_not_below_input(cls, value, values):
        if 'tol_input' in values and value < values['tol_input']:
            raise ValueError('tol_cluster must be >= tol_input')
        return value

    class Config:
        allow_mutation = False

    def cluster_for(self, norm: float) -> float:
        """Eigenvalue grouping width for an operator of the given norm"""
        return self.tol_cluster * max(1.0, float(norm))


@lru_cache(maxsize=1)
def default_tolerances() -> ToleranceProfile:
    return ToleranceProfile()


def resolve_tol(tol: Optional[ToleranceProfile]) -> ToleranceProfile:
    return tol if tol is not None else default_tolerances()


def make_rng(seed: RngLike = None) -> np.random.Generator:
    """Return ``seed`` itself if it is a Generator, else a fresh seeded one"""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


# ---------------------------------------------------------------------------
# Matrix admission
# ---------------------------------------------------------------------------

def as_matrix(m, square: bool = False) -> np.ndarray:
    """Coerce to a finite complex 2-D array"""
    arr = np.asarray(m, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
        raise InvalidMatrix(f"Expected a non-empty 2-D matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidMatrix("Matrix contains NaN or Inf entries")
    if square and arr.shape[0] != arr.shape[1]:
        raise InvalidMatrix(f"Expected a square matrix, got shape {arr.shape}")
    return arr


def as_vector(v) -> np.ndarray:
    arr = np.asarray(v, dtype=complex).reshape(-1)
    if arr.size == 0:
        raise InvalidMatrix("Expected a non-empty vector")
    if not np.all(np.isfinite(arr)):
        raise InvalidMatrix("Vector contains NaN or Inf entries")
    return arr


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(m).T


def hermitian_part(m: np.ndarray) -> np.ndarray:
    return (m + dagger(m)) / 2


def max_abs(m) -> float:
    arr = np.asarray(m)
    return float(np.max(np.abs(arr))) if arr.size else 0.0


def is_hermitian(m: np.ndarray, tol: Optional[ToleranceProfile] = None) -> bool:
    tol = resolve_tol(tol)
    arr = np.asarray(m)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        return False
    return max_abs(arr - dagger(arr)) <= tol.tol_input * max(1.0, max_abs(arr))


def is_unitary(u: np.ndarray, tol: Optional[ToleranceProfile] = None) -> bool:
    tol = resolve_tol(tol)
    arr = np.asarray(u)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        return False
    return max_abs(dagger(arr) @ arr - np.eye(arr.shape[0])) <= tol.tol_ortho


def is_isometry(a: np.ndarray, tol: Optional[ToleranceProfile] = None) -> bool:
    tol = resolve_tol(tol)
    arr = np.asarray(a)
    return max_abs(dagger(arr) @ arr - np.eye(arr.shape[1])) <= tol.tol_input * max(1.0, arr.shape[1])


# ---------------------------------------------------------------------------
# Hermitian eigensolver (cyclic complex Jacobi)
# ---------------------------------------------------------------------------

def _jacobi_diagonalize(a: np.ndarray, max_sweeps: int) -> Tuple[np.ndarray, np.ndarray, int]:
    """Diagonalize Hermitian ``a`` in place; returns (diagonal, V, sweeps)"""
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    scale = float(np.linalg.norm(a))
    if n == 1 or scale == 0.0:
        return a.diagonal().real.copy(), v, 0

    threshold = MACHINE_EPS * scale
    for sweep in range(max_sweeps + 1):
        upper = np.triu(a, 1)
        off = math.sqrt(2.0 * float(np.sum(np.abs(upper) ** 2)))
        if off <= threshold:
            return a.diagonal().real.copy(), v, sweep
        if sweep == max_sweeps:
            break

        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag == 0.0:
                    continue
                theta = (a[q, q].real - a[p, p].real) / (2.0 * mag)
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                phase = np.conj(apq / mag)
                # G = diag(1, e^{-i phi}) . [[c, s], [-s, c]]
                g = np.array([[c, s], [-s * phase, c * phase]], dtype=complex)

                cols = a[:, [p, q]] @ g
                a[:, p] = cols[:, 0]
                a[:, q] = cols[:, 1]
                rows = dagger(g) @ a[[p, q], :]
                a[p, :] = rows[0]
                a[q, :] = rows[1]
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real

                vcols = v[:, [p, q]] @ g
                v[:, p] = vcols[:, 0]
                v[:, q] = vcols[:, 1]

    raise NoConvergence(f"Jacobi eigensolver did not converge in {max_sweeps} sweeps (off-norm {off:.3e})")


def _fix_phases(v: np.ndarray) -> np.ndarray:
    """Make the largest-magnitude entry of each column real and nonnegative"""
    out = v.copy()
    for j in range(out.shape[1]):
        col = out[:, j]
        mags = np.abs(col)
        top = mags.max()
        if top == 0.0:
            continue
        # first index within relative noise of the maximum keeps ties deterministic
        k = int(np.flatnonzero(mags >= top * (1.0 - 1e-10))[0])
        out[:, j] = col * (np.conj(col[k]) / mags[k])
        out[k, j] = out[k, j].real
    return out


def eig_hermitian(m, tol: Optional[ToleranceProfile] = None) -> Tuple[np.ndarray, np.ndarray]:
    """
    Eigendecomposition of a Hermitian matrix.

    Returns ascending real eigenvalues and a unitary matrix whose columns are
    the matching eigenvectors, each normalized so that its largest entry is
    real and nonnegative.

    Raises:
        NotHermitian: if ``m`` deviates from its adjoint by more than tol_input
        NoConvergence: if the sweep cap is exceeded
    """
    tol = resolve_tol(tol)
    arr = as_matrix(m, square=True)
    if not is_hermitian(arr, tol):
        raise NotHermitian(
            f"Matrix is not Hermitian: max |m - m^dagger| = {max_abs(arr - dagger(arr)):.3e}")

    work = hermitian_part(arr).copy()
    values, vectors, sweeps = _jacobi_diagonalize(work, config.JACOBI_MAX_SWEEPS)
    logger.debug("Jacobi converged in %d sweeps for dimension %d", sweeps, arr.shape[0])

    order = np.argsort(values, kind='stable')
    return values[order], _fix_phases(vectors[:, order])


def hermitian_function(m, fn, tol: Optional[ToleranceProfile] = None) -> np.ndarray:
    """Apply a real function to a Hermitian matrix through its eigenvalues"""
    values, vectors = eig_hermitian(m, tol)
    return (vectors * np.asarray(fn(values))) @ dagger(vectors)


def psd_sqrt(m, tol: Optional[ToleranceProfile] = None) -> np.ndarray:
    """Square root of a positive semidefinite matrix; slack down to -tol_input is clipped"""
    tol = resolve_tol(tol)
    values, vectors = eig_hermitian(m, tol)
    if values.size and values[0] < -tol.tol_input:
        raise InvalidMatrix(f"Matrix is not positive semidefinite (min eigenvalue {values[0]:.3e})")
    if values.size and values[0] < 0:
        logger.debug("Clipping negative eigenvalue %.3e to zero", values[0])
    return (vectors * np.sqrt(np.clip(values, 0.0, None))) @ dagger(vectors)


# ---------------------------------------------------------------------------
# Tensor products
# ---------------------------------------------------------------------------

def tensor(a, b, *more) -> np.ndarray:
    """Kronecker product; vectors and matrices both accepted"""
    out = np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))
    for extra in more:
        out = np.kron(out, np.asarray(extra, dtype=complex))
    return out


def partial_trace(m, dims: Sequence[int], side: str = 'second') -> np.ndarray:
    """
    Trace out one factor of a bipartite operator.

    ``side`` names the factor that is traced out: 'second' returns the
    operator on the first factor, 'first' the operator on the second.
    """
    d1, d2 = int(dims[0]), int(dims[1])
    arr = as_matrix(m, square=True)
    if arr.shape[0] != d1 * d2:
        raise DimensionMismatch(f"Operator of size {arr.shape[0]} does not factor as {d1} x {d2}")
    blocks = arr.reshape(d1, d2, d1, d2)
    if side == 'second':
        return np.einsum('ijkj->ik', blocks)
    if side == 'first':
        return np.einsum('ijil->jl', blocks)
    raise ValueError(f"Unknown partial trace side: {side}")


def permute_legs(m: np.ndarray, dims: Sequence[int], order: Sequence[int]) -> np.ndarray:
    """Reorder tensor factors of an operator: new leg k is old leg order[k]"""
    dims = [int(d) for d in dims]
    n = len(dims)
    arr = np.asarray(m).reshape(dims + dims)
    axes = list(order) + [n + k for k in order]
    total = int(np.prod(dims))
    return arr.transpose(axes).reshape(total, total)


# ---------------------------------------------------------------------------
# Subspaces
# ---------------------------------------------------------------------------

class Subspace:
    """A subspace of C^d carried by an orthonormal basis (columns of ``basis``)"""

    def __init__(self, basis, ambient_dim: Optional[int] = None):
        arr = np.asarray(basis, dtype=complex)
        if arr.ndim == 1:
            arr = arr.reshape(-1, 1)
        if ambient_dim is None:
            ambient_dim = arr.shape[0]
        if arr.size == 0:
            arr = np.zeros((ambient_dim, 0), dtype=complex)
        if arr.shape[0] != ambient_dim:
            raise DimensionMismatch(f"Basis vectors have length {arr.shape[0]}, expected {ambient_dim}")
        self.basis = arr
        self.ambient_dim = int(ambient_dim)

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @classmethod
    def zero(cls, ambient_dim: int) -> 'Subspace':
        return cls(np.zeros((ambient_dim, 0), dtype=complex), ambient_dim)

    @classmethod
    def full(cls, ambient_dim: int) -> 'Subspace':
        return cls(np.eye(ambient_dim, dtype=complex), ambient_dim)

    @classmethod
    def span(cls, vectors, ambient_dim: Optional[int] = None,
             tol: Optional[ToleranceProfile] = None) -> 'Subspace':
        """Orthonormal basis of the span of the given columns (or list of vectors)"""
        tol = resolve_tol(tol)
        if isinstance(vectors, np.ndarray) and vectors.ndim == 2:
            mat = vectors.astype(complex)
        else:
            vecs = [as_vector(v) for v in vectors]
            if not vecs:
                if ambient_dim is None:
                    raise ValueError("ambient_dim is required for an empty span")
                return cls.zero(ambient_dim)
            mat = np.column_stack(vecs)
        if ambient_dim is None:
            ambient_dim = mat.shape[0]
        if mat.shape[1] == 0 or max_abs(mat) == 0.0:
            return cls.zero(ambient_dim)
        u, s, _ = np.linalg.svd(mat, full_matrices=False)
        rank = int(np.sum(s > tol.tol_zero * max(1.0, s[0])))
        return cls(u[:, :rank], ambient_dim)

    def projector(self) -> np.ndarray:
        return self.basis @ dagger(self.basis)

    def complement(self, tol: Optional[ToleranceProfile] = None) -> 'Subspace':
        return largest_common_kernel([self.projector()], tol, dim=self.ambient_dim)

    def contains(self, other: 'Subspace', tol: Optional[ToleranceProfile] = None) -> bool:
        """True when ``other`` lies inside this subspace: ||(I - Q) P|| <= tol"""
        tol = resolve_tol(tol)
        if other.dim == 0:
            return True
        residual = other.basis - self.basis @ (dagger(self.basis) @ other.basis)
        return float(np.linalg.norm(residual, 2)) <= tol.tol_zero * 10

    def contains_vector(self, v, tol: Optional[ToleranceProfile] = None) -> bool:
        tol = resolve_tol(tol)
        vec = as_vector(v)
        residual = vec - self.basis @ (dagger(self.basis) @ vec)
        return float(np.linalg.norm(residual)) <= tol.tol_zero * 10 * max(1.0, float(np.linalg.norm(vec)))

    def equals(self, other: 'Subspace', tol: Optional[ToleranceProfile] = None) -> bool:
        return self.dim == other.dim and self.contains(other, tol) and other.contains(self, tol)

    def intersect(self, other: 'Subspace', tol: Optional[ToleranceProfile] = None) -> 'Subspace':
        identity = np.eye(self.ambient_dim)
        return largest_common_kernel([identity - self.projector(), identity - other.projector()],
                                     tol, dim=self.ambient_dim)

    def is_invariant_under(self, op, tol: Optional[ToleranceProfile] = None) -> bool:
        """True when op maps the subspace into itself"""
        tol = resolve_tol(tol)
        if self.dim == 0:
            return True
        image = np.asarray(op) @ self.basis
        residual = image - self.basis @ (dagger(self.basis) @ image)
        return float(np.linalg.norm(residual, 2)) <= tol.tol_zero * 10 * max(1.0, float(np.linalg.norm(op, 2)))

    def to_json(self) -> dict:
        return {'ambient_dim': self.ambient_dim, 'dim': self.dim,
                'basis': matrix_to_json(self.basis.T)}

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient_dim={self.ambient_dim})"


def largest_common_kernel(ops: Sequence, tol: Optional[ToleranceProfile] = None,
                          dim: Optional[int] = None) -> Subspace:
    """
    Orthonormal basis of the intersection of the kernels of ``ops``.

    The operators are stacked vertically and singular values below
    ``tol_zero * max(1, ||stack||)`` count as zero, so operators of round-off
    size leave the whole space.
    """
    tol = resolve_tol(tol)
    mats = [as_matrix(op, square=True) for op in ops]
    if not mats:
        if dim is None:
            raise ValueError("dim is required when no operators are given")
        return Subspace.full(dim)
    d = mats[0].shape[0]
    for mat in mats:
        if mat.shape[0] != d:
            raise DimensionMismatch(f"Operators of sizes {d} and {mat.shape[0]} cannot share a kernel")

    stack = np.vstack(mats)
    _, s, vh = np.linalg.svd(stack, full_matrices=True)
    norm = float(s[0]) if s.size else 0.0
    if norm == 0.0:
        return Subspace.full(d)
    singular = np.zeros(d)
    singular[:s.size] = s
    null_mask = singular <= tol.tol_zero * max(1.0, norm)
    basis = dagger(vh)[:, null_mask]
    return Subspace(basis, d)


def complete_unitary(columns, tol: Optional[ToleranceProfile] = None) -> np.ndarray:
    """
    Extend orthonormal columns to a unitary matrix.

    New columns come from the standard basis by modified Gram-Schmidt with one
    reorthogonalization pass; at each step the candidate with the largest
    residual wins (lowest index on ties), which makes the result deterministic.
    """
    tol = resolve_tol(tol)
    cols = as_matrix(columns)
    d, k = cols.shape
    if max_abs(dagger(cols) @ cols - np.eye(k)) > max(tol.tol_ortho, 1e3 * MACHINE_EPS * k) * 10:
        raise InvalidMatrix("Columns to complete are not orthonormal")
    basis = [cols[:, j] for j in range(k)]

    while len(basis) < d:
        current = np.column_stack(basis) if basis else np.zeros((d, 0), dtype=complex)
        residuals = np.eye(d, dtype=complex) - current @ dagger(current)
        norms = np.linalg.norm(residuals, axis=0)
        j = int(np.argmax(norms))
        vec = residuals[:, j]
        for _ in range(2):
            for b in basis:
                vec = vec - b * np.vdot(b, vec)
        basis.append(vec / np.linalg.norm(vec))
    return np.column_stack(basis)


def unitary_from_isometry(v, probe_dim: int, tol: Optional[ToleranceProfile] = None) -> np.ndarray:
    """
    Unitary W on C^d (x) C^m with W (psi (x) e_0) = V psi for an isometry V.

    V has shape (d * m) x d. Its columns land at positions i * m and the
    completion fills the remaining columns in order.
    """
    v = as_matrix(v)
    d = v.shape[1]
    if v.shape[0] != d * probe_dim:
        raise DimensionMismatch(f"Isometry of shape {v.shape} does not fit probe dimension {probe_dim}")
    completed = complete_unitary(v, tol)
    w = np.zeros((d * probe_dim, d * probe_dim), dtype=complex)
    fixed = [i * probe_dim for i in range(d)]
    free = [k for k in range(d * probe_dim) if k % probe_dim != 0]
    w[:, fixed] = completed[:, :d]
    w[:, free] = completed[:, d:]
    return w


# ---------------------------------------------------------------------------
# Random instances
# ---------------------------------------------------------------------------

def _ginibre(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    return (rng.normal(size=(rows, cols)) + 1j * rng.normal(size=(rows, cols))) / math.sqrt(2.0)


def random_unitary(dim: int, rng: RngLike = None) -> np.ndarray:
    """Haar-random unitary via QR of a complex Gaussian matrix"""
    rng = make_rng(rng)
    q, r = np.linalg.qr(_ginibre(rng, dim, dim))
    diag = np.diag(r)
    phases = diag / np.where(np.abs(diag) > 0, np.abs(diag), 1.0)
    return q * phases


def random_state_vector(dim: int, rng: RngLike = None) -> np.ndarray:
    rng = make_rng(rng)
    v = _ginibre(rng, dim, 1)[:, 0]
    return v / np.linalg.norm(v)


def random_density(dim: int, rng: RngLike = None, rank: Optional[int] = None) -> np.ndarray:
    """Density operator G G^dagger / Tr[G G^dagger] with G of shape dim x rank"""
    rng = make_rng(rng)
    g = _ginibre(rng, dim, rank or dim)
    rho = g @ dagger(g)
    return hermitian_part(rho / np.trace(rho).real)


def random_hermitian(dim: int, rng: RngLike = None, scale: float = 1.0) -> np.ndarray:
    rng = make_rng(rng)
    return scale * hermitian_part(_ginibre(rng, dim, dim))


def random_povm_effects(dim: int, n_outcomes: int, rng: RngLike = None,
                        tol: Optional[ToleranceProfile] = None) -> List[np.ndarray]:
    """Effects S^{-1/2} A_i S^{-1/2} with A_i = G_i G_i^dagger and S = sum A_i"""
    tol = resolve_tol(tol)
    rng = make_rng(rng)
    for attempt in range(config.RANDOM_RETRIES):
        raw = []
        for _ in range(n_outcomes):
            g = _ginibre(rng, dim, dim)
            raw.append(g @ dagger(g))
        total = hermitian_part(sum(raw))
        values, vectors = eig_hermitian(total, tol)
        if values[0] <= tol.tol_zero * max(1.0, values[-1]):
            logger.warning("Random POVM normalizer singular (attempt %d), regenerating", attempt + 1)
            continue
        inv_sqrt = (vectors / np.sqrt(values)) @ dagger(vectors)
        return [hermitian_part(inv_sqrt @ a @ inv_sqrt) for a in raw]
    raise SingularNormalizer(f"POVM normalizer stayed singular after {config.RANDOM_RETRIES} attempts")


def random_instance(kind: str, dim: int, n_outcomes: Optional[int] = None,
                    seed: RngLike = None, tol: Optional[ToleranceProfile] = None):
    """
    Seeded random object of the requested kind.

    kind is one of 'unitary', 'density', 'state_vector', 'povm' or
    'hermitian'. POVMs come back as a list of effect matrices.
    """
    if dim < 1:
        raise ValueError(f"Dimension must be positive, got {dim}")
    rng = make_rng(seed)
    if kind == 'unitary':
        return random_unitary(dim, rng)
    if kind == 'density':
        return random_density(dim, rng)
    if kind == 'state_vector':
        return random_state_vector(dim, rng)
    if kind == 'hermitian':
        return random_hermitian(dim, rng)
    if kind == 'povm':
        return random_povm_effects(dim, n_outcomes or 2, rng, tol)
    raise ValueError(f"Unsupported random instance kind: {kind}")


# ---------------------------------------------------------------------------
# JSON helpers ([re, im] pairs)
# ---------------------------------------------------------------------------

def round_sig(x: float, digits: int = 15) -> float:
    x = float(x)
    if x == 0.0 or not math.isfinite(x):
        return 0.0 if x == 0.0 else x
    return float(f"{x:.{digits}g}")


def complex_to_json(z) -> List[float]:
    z = complex(z)
    return [round_sig(z.real), round_sig(z.imag)]


def complex_from_json(pair) -> complex:
    if isinstance(pair, (int, float)):
        return complex(pair)
    return complex(float(pair[0]), float(pair[1]))


def matrix_to_json(m) -> list:
    arr = np.asarray(m, dtype=complex)
    if arr.ndim == 1:
        return [complex_to_json(z) for z in arr]
    return [[complex_to_json(z) for z in row] for row in arr]


def matrix_from_json(data) -> np.ndarray:
    rows = [[complex_from_json(z) for z in row] for row in data]
    return as_matrix(np.array(rows, dtype=complex))


def vector_from_json(data) -> np.ndarray:
    return as_vector(np.array([complex_from_json(z) for z in data], dtype=complex))
