from ..correlation import condition_taxonomy
from .base_suite import BaseSuite
from .instances import (
    counterexample,
    describe,
    engineer_correlated_pair,
    product_pair,
    random_observable,
    random_state,
)


class ImplicationSuite(BaseSuite):
    """Equi-valuedness equals reproducibility and implies zero difference and identical distribution, not conversely"""

    @property
    def suite_id(self):
        return 'S9-implications'

    def _implications(self, x, y, rho, label):
        report = condition_taxonomy(x, y, rho, self.tol)
        c = report.conditions
        self.check(c['i'] == c['ii'] == c['iii_cyclic'] == c['iv_cyclic'], f"{label}: conditions {c}",
                   **describe(x=x, y=y, rho=rho))
        self.check(not c['i'] or (c['iii'] and c['iv']), f"{label}: equi-valued but {c}",
                   **describe(x=x, y=y, rho=rho))
        return report

    def _separated(self, report, name) -> bool:
        return report.residuals[name] > 10 * self.tol.tol_zero

    def run_trial(self, dim, rng):
        x, y, rho, _ = engineer_correlated_pair(dim, rng, tol=self.tol)
        report = self._implications(x, y, rho, 'engineered pair')
        self.check(report.holds, "engineered pair not equi-valued", **describe(x=x, y=y, rho=rho))
        self._implications(random_observable(dim, rng, self.tol), random_observable(dim, rng, self.tol),
                           random_state(dim, rng, tol=self.tol), 'random pair')

        # zero difference without equi-valuedness or identical distribution
        x, y, psi = counterexample(self.tol)
        report = self._implications(x, y, psi, 'counterexample')
        c = report.conditions
        self.check(c['iii'] and not c['i'] and not c['iv'], f"counterexample: conditions {c}")
        self.check(self._separated(report, 'i') and self._separated(report, 'iv'),
                   f"counterexample violations too small: {report.residuals}")

        # identical distribution without equi-valuedness or zero difference
        x, y, psi = product_pair(tol=self.tol)
        report = self._implications(x, y, psi, 'product pair')
        c = report.conditions
        self.check(c['iv'] and not c['i'] and not c['iii'], f"product pair: conditions {c}")
        self.check(self._separated(report, 'i') and self._separated(report, 'iii'),
                   f"product pair violations too small: {report.residuals}")
        return 10
