import numpy as np

from ..correlation import domain_transitivity, is_perfectly_correlated, perfectly_correlative_domain
from ..linalg_core import Subspace, dagger, random_unitary
from ..states import QuantumState
from .base_suite import BaseSuite
from .instances import describe, engineer_correlated_pair, random_observable, random_state


class LargestDomainSuite(BaseSuite):
    """{X=Y} holds exactly the states in which X and Y are perfectly correlated"""

    @property
    def suite_id(self):
        return 'S5-largest'

    def _check_domain(self, x, y, rho) -> int:
        domain = perfectly_correlative_domain(x, y, self.tol)
        inside = domain.contains(rho.support(self.tol), self.tol)
        correlated = is_perfectly_correlated(x, y, rho, self.tol).correlated
        self.check(inside == correlated, f"support inside {{X=Y}}: {inside}, correlated: {correlated}",
                   **describe(x=x, y=y, rho=rho))
        for _, p in x.spectrum + y.spectrum:
            self.check(domain.is_invariant_under(p, self.tol), "{X=Y} not invariant under a spectral projector",
                       **describe(x=x, y=y))
        if domain.dim > 0:
            uniform = QuantumState.uniform_on(domain, self.tol)
            self.check(is_perfectly_correlated(x, y, uniform, self.tol).correlated,
                       "not correlated in the uniform state on {X=Y}", **describe(x=x, y=y))
        return 3

    def run_trial(self, dim, rng):
        x, y, rho, _ = engineer_correlated_pair(dim, rng, tol=self.tol)
        checks = self._check_domain(x, y, rho)
        x, y = random_observable(dim, rng, self.tol), random_observable(dim, rng, self.tol)
        return checks + self._check_domain(x, y, random_state(dim, rng, tol=self.tol))


class TransitivitySuite(BaseSuite):
    """X = Y and Y = Z in rho give X = Z in rho, and {X=Y} & {Y=Z} lies in {X=Z}"""

    @property
    def suite_id(self):
        return 'S5-transitivity'

    def run_trial(self, dim, rng):
        x, y, rho, basis = engineer_correlated_pair(dim, rng, tol=self.tol)
        rest = Subspace(basis, dim).complement(self.tol).basis
        w = basis @ dagger(basis)
        if rest.shape[1]:
            w = w + rest @ random_unitary(rest.shape[1], rng) @ dagger(rest)
        z = y.conjugate(w)
        for a, b, label in ((x, y, 'X=Y'), (y, z, 'Y=Z'), (x, z, 'X=Z')):
            self.check(is_perfectly_correlated(a, b, rho, self.tol).correlated, f"engineered {label} failed",
                       **describe(x=x, y=y, z=z, rho=rho))
        self.check(domain_transitivity(x, y, z, self.tol), "engineered domains not transitive",
                   **describe(x=x, y=y, z=z))

        x, y, z = (random_observable(dim, rng, self.tol) for _ in range(3))
        rho = random_state(dim, rng, tol=self.tol)
        xy = is_perfectly_correlated(x, y, rho, self.tol).correlated
        yz = is_perfectly_correlated(y, z, rho, self.tol).correlated
        xz = is_perfectly_correlated(x, z, rho, self.tol).correlated
        self.check(xz or not (xy and yz), "X=Y and Y=Z without X=Z", **describe(x=x, y=y, z=z, rho=rho))
        self.check(domain_transitivity(x, y, z, self.tol), "random domains not transitive",
                   **describe(x=x, y=y, z=z))
        return 6
