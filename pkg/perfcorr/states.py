import logging
from typing import List, Optional, Tuple

import numpy as np

from .errors import DimensionMismatch, InvalidState
from .linalg_core import (
    Subspace,
    ToleranceProfile,
    as_matrix,
    as_vector,
    dagger,
    eig_hermitian,
    hermitian_part,
    is_hermitian,
    matrix_from_json,
    matrix_to_json,
    resolve_tol,
    tensor,
    vector_from_json,
)
from .models import StateKind

logger = logging.getLogger(__name__)


class QuantumState:
    """A unit vector psi or a density operator rho on C^d"""

    def __init__(self, vector=None, density=None, tol: Optional[ToleranceProfile] = None,
                 normalize: bool = False, validate: bool = True):
        tol = resolve_tol(tol)
        if (vector is None) == (density is None):
            raise InvalidState("A state needs exactly one of vector or density")

        if vector is not None:
            psi = as_vector(vector)
            norm = float(np.linalg.norm(psi))
            if normalize:
                if norm <= tol.tol_zero:
                    raise InvalidState("Cannot normalize a zero vector")
                psi = psi / norm
            elif abs(norm - 1.0) > tol.tol_prob:
                raise InvalidState(f"State vector has norm {norm:.12g}, expected 1")
            self.kind = StateKind.VECTOR
            self.vector = psi
            self.density = np.outer(psi, np.conj(psi))
        else:
            rho = as_matrix(density, square=True)
            if not is_hermitian(rho, tol):
                raise InvalidState("Density operator is not Hermitian")
            rho = hermitian_part(rho)
            trace = float(np.trace(rho).real)
            if normalize:
                rho = rho / trace
            elif abs(trace - 1.0) > tol.tol_prob:
                raise InvalidState(f"Density operator has trace {trace:.12g}, expected 1")
            if validate:
                values, _ = eig_hermitian(rho, tol)
                if values[0] < -tol.tol_input:
                    raise InvalidState(f"Density operator has negative eigenvalue {values[0]:.3e}")
            self.kind = StateKind.DENSITY
            self.vector = None
            self.density = rho
        self.dim = self.density.shape[0]
        self._tol = tol

    @classmethod
    def from_vector(cls, v, tol=None, normalize=False) -> 'QuantumState':
        return cls(vector=v, tol=tol, normalize=normalize)

    @classmethod
    def from_density(cls, m, tol=None, normalize=False) -> 'QuantumState':
        return cls(density=m, tol=tol, normalize=normalize)

    @classmethod
    def uniform_on(cls, subspace: Subspace, tol=None) -> 'QuantumState':
        """Maximally mixed state P/k on a nonzero subspace"""
        if subspace.dim == 0:
            raise InvalidState("Cannot build a state on the zero subspace")
        return cls(density=subspace.projector() / subspace.dim, tol=tol)

    @property
    def is_vector(self) -> bool:
        return self.kind == StateKind.VECTOR

    def eigen_components(self, tol: Optional[ToleranceProfile] = None) -> List[Tuple[float, np.ndarray]]:
        """(weight, unit vector) pairs spanning the support of the state"""
        tol = resolve_tol(tol)
        if self.is_vector:
            return [(1.0, self.vector)]
        values, vectors = eig_hermitian(self.density, tol)
        return [(float(values[k]), vectors[:, k]) for k in range(len(values))
                if values[k] > tol.tol_zero]

    def support(self, tol: Optional[ToleranceProfile] = None) -> Subspace:
        comps = self.eigen_components(tol)
        return Subspace.span([v for _, v in comps], self.dim, tol)

    def expectation(self, op) -> complex:
        """Tr[op rho]"""
        op = np.asarray(op)
        self._check_dim(op.shape[0])
        if self.is_vector:
            return complex(np.vdot(self.vector, op @ self.vector))
        return complex(np.trace(op @ self.density))

    def act(self, op) -> np.ndarray:
        """op psi for vector states, op rho for density states"""
        op = np.asarray(op)
        self._check_dim(op.shape[1])
        return op @ (self.vector if self.is_vector else self.density)

    def conjugate(self, u) -> 'QuantumState':
        """The state U^dagger rho U"""
        u = np.asarray(u)
        if self.is_vector:
            return QuantumState(vector=dagger(u) @ self.vector, tol=self._tol, normalize=True)
        return QuantumState(density=dagger(u) @ self.density @ u, tol=self._tol)

    def tensor(self, other: 'QuantumState') -> 'QuantumState':
        if self.is_vector and other.is_vector:
            return QuantumState(vector=tensor(self.vector, other.vector), tol=self._tol)
        # a product of positive operators is positive
        return QuantumState(density=tensor(self.density, other.density), tol=self._tol, validate=False)

    def _check_dim(self, d: int):
        if d != self.dim:
            raise DimensionMismatch(f"Operator of dimension {d} applied to a state of dimension {self.dim}")

    def to_json(self) -> dict:
        if self.is_vector:
            return {'vector': matrix_to_json(self.vector)}
        return {'density': matrix_to_json(self.density)}

    @classmethod
    def from_json(cls, data: dict, tol=None) -> 'QuantumState':
        if data.get('vector') is not None:
            return cls(vector=vector_from_json(data['vector']), tol=tol)
        return cls(density=matrix_from_json(data['density']), tol=tol)

    def __repr__(self):
        return f"QuantumState(kind={self.kind.value}, dim={self.dim})"
