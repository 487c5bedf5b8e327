import numpy as np

from ..correlation import function_transport, proposition_conditions, unitary_transport
from ..linalg_core import random_unitary
from ..povm_dilation import transport_check
from ..spectral import Povm, RealFunction
from .base_suite import BaseSuite
from .instances import describe, engineer_correlated_pair, random_observable, random_povm, random_state


def _transport_function(rng: np.random.Generator) -> RealFunction:
    choice = int(rng.integers(4))
    if choice == 0:
        return RealFunction.affine(float(rng.choice([-2.0, 0.5, 3.0])), float(rng.normal()))
    if choice == 1:
        return RealFunction.named('arctan')
    if choice == 2:
        return RealFunction.power(2)
    return RealFunction.named('abs')


class PropositionSuite(BaseSuite):
    """The three trace characterizations of correlated POVMs agree"""

    @property
    def suite_id(self):
        return 'S2-proposition'

    @property
    def description(self):
        return 'Tr[P1(D)P2(G)rho] conditions agree for engineered and random POVM pairs'

    def run_trial(self, dim, rng):
        x, y, rho, _ = engineer_correlated_pair(dim, rng, tol=self.tol)
        verdict = proposition_conditions(Povm.projective(x), Povm.projective(y), rho, self.tol)
        self.check(verdict.correlated and verdict.all_agree,
                   f"engineered pair: conditions {verdict.conditions}", **describe(x=x, y=y, rho=rho))

        p1, p2 = random_povm(dim, rng, tol=self.tol), random_povm(dim, rng, tol=self.tol)
        state = random_state(dim, rng, tol=self.tol)
        verdict = proposition_conditions(p1, p2, state, self.tol)
        self.check(verdict.all_agree, f"random POVMs: conditions {verdict.conditions}",
                   **describe(p1=p1, p2=p2, rho=state))
        return 2


class TransportSuite(BaseSuite):
    """Correlation survives unitary conjugation and relabeling by functions"""

    @property
    def suite_id(self):
        return 'S2-transport'

    def run_trial(self, dim, rng):
        checks = 0
        engineered = engineer_correlated_pair(dim, rng, tol=self.tol)[:3]
        random_pair = (random_observable(dim, rng, self.tol), random_observable(dim, rng, self.tol),
                       random_state(dim, rng, tol=self.tol))
        for x, y, rho in (engineered, random_pair):
            u = random_unitary(dim, rng)
            before, after = unitary_transport(x, y, rho, u, self.tol)
            self.check(before == after, f"unitary transport changed the verdict {before} -> {after}",
                       **describe(x=x, y=y, rho=rho, u=u))
            f = _transport_function(rng)
            before, after = function_transport(x, y, rho, f, self.tol)
            self.check(after or not before, f"{f.to_json()} broke a perfect correlation",
                       **describe(x=x, y=y, rho=rho))
            if f.is_injective_on(x.values + y.values):
                self.check(before == after, f"injective {f.to_json()} changed the verdict",
                           **describe(x=x, y=y, rho=rho))
            self.check(transport_check(Povm.projective(x), Povm.projective(y), rho, f, self.tol),
                       f"POVM relabeling by {f.to_json()} was inconsistent", **describe(x=x, y=y, rho=rho))
            checks += 4
        return checks
