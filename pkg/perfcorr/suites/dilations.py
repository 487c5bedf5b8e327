from ..povm_dilation import distance_povm_check, joint_dilate, naimark_dilate, observable_povm_pc
from ..spectral import Povm
from .base_suite import BaseSuite
from .instances import describe, engineer_correlated_povm, random_observable, random_povm, random_state

DILATION_BOUND = 1e-9


class JointDilationSuite(BaseSuite):
    """A joint Naimark dilation reproduces Pi1 Pi2 and the single dilations reproduce the Born rule"""

    @property
    def suite_id(self):
        return 'S4-joint-dilation'

    def run_trial(self, dim, rng):
        p1, p2 = random_povm(dim, rng, tol=self.tol), random_povm(dim, rng, tol=self.tol)
        rho = random_state(dim, rng, tol=self.tol)

        single = naimark_dilate(p1, self.tol)
        self.check(single.check() <= DILATION_BOUND, f"Naimark residual {single.check()}", **describe(p1=p1))
        for (label, dilated), prob in zip(single.statistics(rho), p1.probabilities(rho)):
            self.check(abs(dilated - prob) <= DILATION_BOUND,
                       f"outcome {label}: dilated probability {dilated} vs {prob}", **describe(p1=p1, rho=rho))

        joint = joint_dilate(p1, p2, self.tol)
        residual = joint.check()
        self.check(residual <= DILATION_BOUND, f"joint dilation residual {residual}", **describe(p1=p1, p2=p2))
        return 3


class DistancePovmSuite(BaseSuite):
    """POVMs are correlated iff their joint dilation is, and then Pi1(f) rho = Pi2(f) rho"""

    @property
    def suite_id(self):
        return 'S4-distance-povm'

    def _compare(self, p1, p2, rho):
        report = distance_povm_check(p1, p2, rho, self.tol)
        correlated = report.conditions['correlated']
        self.check(correlated == report.conditions['dilation_correlated'],
                   f"direct and dilated verdicts differ: {report.conditions}", **describe(p1=p1, p2=p2, rho=rho))
        self.check(report.conditions['functions_agree'] or not correlated,
                   "correlated POVMs disagree on a function of the outcome", **describe(p1=p1, p2=p2, rho=rho))
        return correlated

    def run_trial(self, dim, rng):
        x, p, rho = engineer_correlated_povm(dim, rng, self.tol)
        self.check(self._compare(Povm.projective(x), p, rho), "engineered POVM pair not correlated",
                   **describe(x=x, p=p, rho=rho))
        self._compare(random_povm(dim, rng, tol=self.tol), random_povm(dim, rng, tol=self.tol),
                      random_state(dim, rng, tol=self.tol))
        return 5


class PovmObservableSuite(BaseSuite):
    """Characterizations of an observable correlated with a POVM agree"""

    @property
    def suite_id(self):
        return 'S4-pc-state3'

    def run_trial(self, dim, rng):
        x, p, rho = engineer_correlated_povm(dim, rng, self.tol)
        verdict = observable_povm_pc(x, p, rho, self.tol)
        self.check(verdict.correlated and verdict.all_agree, f"engineered pair: conditions {verdict.conditions}",
                   **describe(x=x, p=p, rho=rho))

        x, p = random_observable(dim, rng, self.tol), random_povm(dim, rng, tol=self.tol)
        rho = random_state(dim, rng, tol=self.tol)
        verdict = observable_povm_pc(x, p, rho, self.tol)
        self.check(verdict.all_agree, f"random pair: conditions {verdict.conditions}", **describe(x=x, p=p, rho=rho))
        return 2
