import numpy as np

from ..correlation import (
    check_equivalences_mixed,
    check_equivalences_vector,
    identically_distributed,
    is_perfectly_correlated,
    random_cyclic_vectors,
    superposition_certificate,
)
from ..linalg_core import random_state_vector
from ..spectral import moment
from ..states import QuantumState
from .base_suite import BaseSuite
from .instances import (
    counterexample,
    describe,
    engineer_correlated_pair,
    product_pair,
    random_observable,
    random_state,
    vector_in,
)

CYCLIC_SAMPLES = 3


class VectorEquivalenceSuite(BaseSuite):
    """The six characterizations in a vector state agree"""

    @property
    def suite_id(self):
        return 'S3-vector-equivalence'

    def run_trial(self, dim, rng):
        x, y, _, basis = engineer_correlated_pair(dim, rng, tol=self.tol)
        psi = vector_in(basis, rng, self.tol)
        verdict = check_equivalences_vector(x, y, psi, self.tol)
        self.check(verdict.correlated and verdict.all_agree,
                   f"engineered pair: conditions {verdict.conditions}", **describe(x=x, y=y, psi=psi))

        x, y = random_observable(dim, rng, self.tol), random_observable(dim, rng, self.tol)
        psi = random_state(dim, rng, mixed=False, tol=self.tol)
        verdict = check_equivalences_vector(x, y, psi, self.tol)
        self.check(verdict.all_agree, f"random pair: conditions {verdict.conditions}",
                   **describe(x=x, y=y, psi=psi))
        return 2


class MixedEquivalenceSuite(BaseSuite):
    """The mixed-state characterizations and the domain conditions agree"""

    @property
    def suite_id(self):
        return 'S3-mixed'

    def run_trial(self, dim, rng):
        x, y, rho, _ = engineer_correlated_pair(dim, rng, tol=self.tol)
        verdict = check_equivalences_mixed(x, y, rho, self.tol)
        self.check(verdict.correlated and verdict.all_agree,
                   f"engineered pair: conditions {verdict.conditions}", **describe(x=x, y=y, rho=rho))

        x, y = random_observable(dim, rng, self.tol), random_observable(dim, rng, self.tol)
        rho = random_state(dim, rng, mixed=True, tol=self.tol)
        verdict = check_equivalences_mixed(x, y, rho, self.tol)
        self.check(verdict.all_agree, f"random pair: conditions {verdict.conditions}",
                   **describe(x=x, y=y, rho=rho))
        return 2


class BornSuite(BaseSuite):
    """Correlated in rho iff identically distributed in every vector of C(X, rho)"""

    @property
    def suite_id(self):
        return 'S3-born'

    def _agrees(self, x, y, rho, rng) -> bool:
        correlated = is_perfectly_correlated(x, y, rho, self.tol).correlated
        everywhere = all(identically_distributed(x, y, QuantumState(vector=v, tol=self.tol), self.tol)
                         for v in random_cyclic_vectors(x, rho, CYCLIC_SAMPLES, rng, self.tol))
        return correlated == everywhere

    def run_trial(self, dim, rng):
        x, y, rho, _ = engineer_correlated_pair(dim, rng, tol=self.tol)
        self.check(self._agrees(x, y, rho, rng), "engineered pair disagrees with its distributions",
                   **describe(x=x, y=y, rho=rho))
        x, y = random_observable(dim, rng, self.tol), random_observable(dim, rng, self.tol)
        rho = random_state(dim, rng, tol=self.tol)
        self.check(self._agrees(x, y, rho, rng), "random pair disagrees with its distributions",
                   **describe(x=x, y=y, rho=rho))
        return 2


class SuperpositionSuite(BaseSuite):
    """Correlated in psi iff psi is a superposition of common eigenvectors with common values"""

    @property
    def suite_id(self):
        return 'S3-scece'

    def _certify(self, x, y, psi):
        correlated = is_perfectly_correlated(x, y, psi, self.tol).correlated
        components = superposition_certificate(x, y, psi, self.tol)
        self.check(correlated == (components is not None),
                   f"certificate present={components is not None} but correlated={correlated}",
                   **describe(x=x, y=y, psi=psi))
        if components is not None:
            total = sum(c for _, c in components)
            self.check(np.linalg.norm(total - psi.vector) <= self.tol.tol_zero * 10,
                       "certified components do not sum to psi", **describe(x=x, y=y, psi=psi))

    def run_trial(self, dim, rng):
        x, y, _, basis = engineer_correlated_pair(dim, rng, tol=self.tol)
        self._certify(x, y, vector_in(basis, rng, self.tol))
        self._certify(random_observable(dim, rng, self.tol), random_observable(dim, rng, self.tol),
                      random_state(dim, rng, mixed=False, tol=self.tol))
        return 2


class CounterexampleSuite(BaseSuite):
    """X psi = Y psi for unitarily equivalent X, Y does not give perfect correlation"""

    dims = (4,)

    @property
    def suite_id(self):
        return 'S3-counterexample'

    def run_trial(self, dim, rng):
        x, y, psi = counterexample(self.tol)
        third_x, third_y = moment(x, psi, 3), moment(y, psi, 3)
        self.check(abs(third_x - 4.0) <= 1e-12 and abs(third_y - 3.0) <= 1e-12,
                   f"third moments {third_x}, {third_y}")
        self.check(np.linalg.norm(psi.act(x.matrix) - psi.act(y.matrix)) <= 1e-12, "X psi != Y psi")
        self.check(np.allclose(sorted(np.linalg.eigvalsh(x.matrix)), sorted(np.linalg.eigvalsh(y.matrix))),
                   "X and Y are not unitarily equivalent")
        verdict = check_equivalences_vector(x, y, psi, self.tol)
        self.check(not verdict.correlated and verdict.all_agree,
                   f"counterexample conditions {verdict.conditions}")
        self.check(verdict.witness is not None and verdict.witness.magnitude > 10 * self.tol.tol_zero,
                   "violation below the separation band")
        return 5


class IdenticalNotCorrelatedSuite(BaseSuite):
    """A (x) I and I (x) A in phi (x) phi are identically distributed but not correlated"""

    dims = (2, 3)

    @property
    def suite_id(self):
        return 'S3-identical-not-correlated'

    def run_trial(self, dim, rng):
        a = random_observable(dim, rng, self.tol, distinct=True)
        phi = random_state_vector(dim, rng)
        x, y, psi = product_pair(a.matrix, phi, self.tol)
        self.check(identically_distributed(x, y, psi, self.tol), "product pair not identically distributed",
                   **describe(a=a, phi=phi))
        verdict = is_perfectly_correlated(x, y, psi, self.tol)
        self.check(not verdict.correlated and verdict.witness.magnitude > 10 * self.tol.tol_zero,
                   "product pair unexpectedly correlated", **describe(a=a, phi=phi))

        x, y, psi = product_pair(tol=self.tol)
        verdict = is_perfectly_correlated(x, y, psi, self.tol)
        self.check(abs(verdict.witness.magnitude - 0.25) <= 1e-12,
                   f"cross term {verdict.witness.magnitude}, expected 1/4")
        return 3
