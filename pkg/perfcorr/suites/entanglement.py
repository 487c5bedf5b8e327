import numpy as np

from ..bipartite import (
    bipartite_pc_characterize,
    hardy_check,
    hardy_construction,
    maximally_entangled_state,
    schmidt,
    schmidt_observables,
)
from ..correlation import is_perfectly_correlated
from ..linalg_core import random_state_vector, random_unitary, tensor
from ..models import HardyVerdict
from ..states import QuantumState
from .base_suite import BaseSuite
from .instances import describe, observable_from_basis, random_observable, random_values

CERTIFICATE_BOUND = 1e-9


class BipartiteCharacterizationSuite(BaseSuite):
    """X (x) I and I (x) Y are correlated in psi iff psi has a Schmidt form over common eigenvalues"""

    dims = (2, 3)

    @property
    def suite_id(self):
        return 'S7-characterization'

    def _certify(self, x, y, psi, dims):
        correlated = is_perfectly_correlated(x.extend(dims[1], 'right'), y.extend(dims[0], 'left'),
                                             QuantumState(vector=psi, tol=self.tol), self.tol).correlated
        found = bipartite_pc_characterize(x, y, psi, dims, self.tol)
        self.check((found is not None) == correlated, f"certificate present={found is not None}, correlated={correlated}",
                   **describe(x=x, y=y, psi=psi))
        if found is None:
            return correlated
        self.check(np.linalg.norm(found.reconstruct() - psi) <= CERTIFICATE_BOUND,
                   "certified Schmidt form does not rebuild psi", **describe(x=x, y=y, psi=psi))
        for j, value in enumerate(found.values):
            left, right = found.left[:, j], found.right[:, j]
            self.check(np.linalg.norm(x.matrix @ left - value * left) <= CERTIFICATE_BOUND
                       and np.linalg.norm(y.matrix @ right - value * right) <= CERTIFICATE_BOUND,
                       f"Schmidt vector {j} is not an eigenvector for {value}", **describe(x=x, y=y, psi=psi))
        return correlated

    def run_trial(self, dim, rng):
        dims = (2, dim)
        psi = random_state_vector(dims[0] * dims[1], rng)
        decomposition = schmidt(psi, dims, self.tol)
        x, y = schmidt_observables(decomposition, random_values(rng, decomposition.rank), tol=self.tol)
        self.check(self._certify(x, y, psi, dims), "Schmidt-built pair not correlated", **describe(x=x, y=y, psi=psi))

        # A (x) I and I (x) A in a state diagonal in the eigenbasis of A
        basis = random_unitary(dim, rng)
        a = observable_from_basis(basis, random_values(rng, dim), self.tol)
        weights = rng.random(dim) + 0.1
        weights = weights / np.linalg.norm(weights)
        diag_state = sum(weights[k] * tensor(basis[:, k], basis[:, k]) for k in range(dim))
        self.check(self._certify(a, a, diag_state, (dim, dim)), "A (x) I and I (x) A not correlated",
                   **describe(a=a, psi=diag_state))

        self._certify(random_observable(dims[0], rng, self.tol), random_observable(dims[1], rng, self.tol),
                      random_state_vector(dims[0] * dims[1], rng), dims)
        return 5


class HardyMaximalSuite(BaseSuite):
    """Hardy's conditions cannot all hold in a maximally entangled state"""

    dims = (2,)

    @property
    def suite_id(self):
        return 'S7-hardy-max'

    def run_trial(self, dim, rng):
        psi = maximally_entangled_state(2, random_unitary(2, rng))
        theta, phi = float(rng.uniform(0.05, np.pi - 0.05)), float(rng.uniform(0.0, 2 * np.pi))
        found = hardy_construction(psi, theta, phi)
        self.check(found is not None, "construction degenerated on a maximally entangled state",
                   **describe(psi=psi, theta=theta, phi=phi))
        report = hardy_check(psi, found.u1, found.d1, found.u2, found.d2, self.tol)
        self.check(report.verdict != HardyVerdict.NONLOCALITY_WITNESSED, "nonlocality witnessed in a maximal state",
                   **describe(psi=psi, theta=theta, phi=phi))
        self.check(report.verdict == HardyVerdict.BLOCKED_BY_TRANSITIVITY and len(report.correlation_chain) == 4,
                   f"verdict {report.verdict} with chain {report.correlation_chain}",
                   **describe(psi=psi, theta=theta, phi=phi))

        # P(U1=0, U2=1) = 0 forces P(U1=1, U2=0) = 0 in a maximal state
        left = tensor(found.u1.projector_at(1.0), np.eye(2)) @ psi
        right = tensor(np.eye(2), found.u2.projector_at(0.0)) @ psi
        reverse = abs(np.vdot(left, right))
        self.check(reverse <= 10 * self.tol.tol_prob, f"P(U1=1, U2=0) = {reverse}",
                   **describe(psi=psi, theta=theta, phi=phi))
        return 4
