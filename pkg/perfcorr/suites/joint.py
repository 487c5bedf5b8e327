import numpy as np

from ..correlation import is_perfectly_correlated, random_cyclic_vectors
from ..joint_dist import (
    characteristic_functions,
    compatibility_conditions,
    diagonal_concentration,
    joint_distribution,
    joint_measurability_check,
    phi_function,
    phi_shift_residual,
    psi_shift_residual,
    successive_measurement,
)
from ..models import MeasurementOrder
from .base_suite import BaseSuite
from .instances import (
    describe,
    engineer_compatible_pair,
    engineer_correlated_pair,
    random_observable,
    random_state,
    vector_in,
)

SAMPLES = 2000
PSI_BOUND = 1e-8
PHI_BOUND = 1e-7
PHI_VALUES = np.linspace(-2.0, 2.0, 5)
AXIS_VALUES = np.linspace(-3.0, 3.0, 7)


class JointDistributionSuite(BaseSuite):
    """The joint distribution exists iff the state lies in the commutative domain"""

    @property
    def suite_id(self):
        return 'S6-jpd'

    def _check_record(self, x, y, rho):
        record = joint_distribution(x, y, rho, self.tol)
        report = compatibility_conditions(x, y, rho, self.tol)
        self.check(report.all_agree, f"compatibility conditions {report.conditions}",
                   **describe(x=x, y=y, rho=rho))
        self.check(record.present == report.holds, f"distribution present={record.present}, compatible={report.holds}",
                   **describe(x=x, y=y, rho=rho))
        if not record.present:
            return
        bound = 10 * self.tol.tol_prob
        self.check(abs(sum(c.p for c in record.cells) - 1.0) <= bound, "cells do not sum to one",
                   **describe(x=x, y=y, rho=rho))
        self.check(all(abs(c.p - c.meet) <= bound for c in record.cells), "cell value differs from its meet",
                   **describe(x=x, y=y, rho=rho))
        for lam, p in x.spectrum:
            marginal = sum(c.p for c in record.cells if c.x == lam)
            self.check(abs(marginal - rho.expectation(p).real) <= bound, f"X marginal at {lam} is off",
                       **describe(x=x, y=y, rho=rho))
        for mu, q in y.spectrum:
            marginal = sum(c.p for c in record.cells if c.y == mu)
            self.check(abs(marginal - rho.expectation(q).real) <= bound, f"Y marginal at {mu} is off",
                       **describe(x=x, y=y, rho=rho))

    def run_trial(self, dim, rng):
        x, y, rho, _ = engineer_compatible_pair(dim, rng, self.tol)
        self.check(joint_distribution(x, y, rho, self.tol).present, "engineered compatible pair has no distribution",
                   **describe(x=x, y=y, rho=rho))
        self._check_record(x, y, rho)
        x, y = random_observable(dim, rng, self.tol), random_observable(dim, rng, self.tol)
        self._check_record(x, y, random_state(dim, rng, tol=self.tol))
        return 4


class JointMeasurabilitySuite(BaseSuite):
    """Compatible pairs are jointly measurable and successive measurements follow the sandwich law"""

    @property
    def suite_id(self):
        return 'S6-jm'

    def run_trial(self, dim, rng):
        x, y, rho, _ = engineer_compatible_pair(dim, rng, self.tol)
        measurable, residual = joint_measurability_check(x, y, rho, self.tol)
        self.check(measurable, f"compatible pair not jointly measurable, residual {residual}",
                   **describe(x=x, y=y, rho=rho))

        order = MeasurementOrder.XY if rng.integers(2) == 0 else MeasurementOrder.YX
        run = successive_measurement(x, y, rho, order, SAMPLES, seed=int(rng.integers(2 ** 31)), tol=self.tol)
        for tally in run.pair_tallies:
            self.check(abs(tally.frequency - tally.probability) <= 5 * tally.stderr + 1e-9,
                       f"({tally.x}, {tally.y}) frequency {tally.frequency} vs probability {tally.probability}",
                       **describe(x=x, y=y, rho=rho, order=order.value))
        return 2


class DiagonalConcentrationSuite(BaseSuite):
    """Correlated iff the joint distribution exists and sits on the diagonal"""

    @property
    def suite_id(self):
        return 'S6-pcjpd'

    def _agrees(self, x, y, rho):
        correlated = is_perfectly_correlated(x, y, rho, self.tol).correlated
        diagonal, mass = diagonal_concentration(x, y, rho, self.tol)
        self.check(diagonal == correlated, f"diagonal={diagonal} (off-diagonal mass {mass}), correlated={correlated}",
                   **describe(x=x, y=y, rho=rho))
        return correlated

    def run_trial(self, dim, rng):
        x, y, rho, _ = engineer_correlated_pair(dim, rng, tol=self.tol)
        self.check(self._agrees(x, y, rho), "engineered pair not correlated", **describe(x=x, y=y, rho=rho))
        for order in MeasurementOrder:
            run = successive_measurement(x, y, rho, order, 200, seed=int(rng.integers(2 ** 31)), tol=self.tol)
            self.check(run.all_equal, f"successive measurement in order {order.value} gave unequal values",
                       **describe(x=x, y=y, rho=rho))
        self._agrees(random_observable(dim, rng, self.tol), random_observable(dim, rng, self.tol),
                     random_state(dim, rng, tol=self.tol))
        return 5


class CharacteristicPsiSuite(BaseSuite):
    """Correlated in psi iff Psi_{t,s}(1) = Psi_{t+s,0}(1) across the grid"""

    @property
    def suite_id(self):
        return 'S6-psi'

    def _agrees(self, x, y, psi):
        correlated = is_perfectly_correlated(x, y, psi, self.tol).correlated
        residual = psi_shift_residual(x, y, psi)
        self.check((residual <= PSI_BOUND) == correlated, f"shift residual {residual}, correlated={correlated}",
                   **describe(x=x, y=y, psi=psi))
        return correlated

    def run_trial(self, dim, rng):
        x, y, _, basis = engineer_correlated_pair(dim, rng, tol=self.tol)
        self.check(self._agrees(x, y, vector_in(basis, rng, self.tol)), "engineered pair not correlated",
                   **describe(x=x, y=y))
        self._agrees(random_observable(dim, rng, self.tol), random_observable(dim, rng, self.tol),
                     random_state(dim, rng, mixed=False, tol=self.tol))
        return 3


class CharacteristicPhiSuite(BaseSuite):
    """Correlation gives Phi_{t,s}(1) = Phi_{t+s,0}(1) for vectors of the cyclic subspace"""

    @property
    def suite_id(self):
        return 'S6-phi'

    def _worst(self, x, y, rho, rng) -> float:
        return max(phi_shift_residual(x, y, phi, PHI_VALUES)
                   for phi in random_cyclic_vectors(x, rho, 2, rng, self.tol))

    def run_trial(self, dim, rng):
        x, y, rho, basis = engineer_correlated_pair(dim, rng, tol=self.tol)
        worst = self._worst(x, y, rho, rng)
        self.check(worst <= PHI_BOUND, f"engineered pair: Phi shift residual {worst}", **describe(x=x, y=y, rho=rho))

        psi = vector_in(basis, rng, self.tol)
        forward = phi_function(x, y, psi.vector, [(t, 0.0, 1.0) for t in AXIS_VALUES])
        backward = phi_function(x, y, psi.vector, [(0.0, t, 1.0) for t in AXIS_VALUES])
        self.check(np.max(np.abs(forward - backward)) <= PHI_BOUND, "Phi_{t,0} != Phi_{0,t} for a correlated pair",
                   **describe(x=x, y=y, psi=psi))

        x, y = random_observable(dim, rng, self.tol), random_observable(dim, rng, self.tol)
        rho = random_state(dim, rng, tol=self.tol)
        verdict = is_perfectly_correlated(x, y, rho, self.tol)
        worst = self._worst(x, y, rho, rng)
        if verdict.correlated:
            self.check(worst <= PHI_BOUND, f"random correlated pair: Phi shift residual {worst}",
                       **describe(x=x, y=y, rho=rho))
        elif verdict.witness.magnitude > 1e-4:
            self.check(worst > PHI_BOUND, "uncorrelated pair passed every sampled Phi shift",
                       **describe(x=x, y=y, rho=rho))

        psi = random_state(dim, rng, mixed=False, tol=self.tol)
        grid = [(t, 0.0, 1.0) for t in AXIS_VALUES] + [(0.0, t, 1.0) for t in AXIS_VALUES]
        sample = characteristic_functions(x, y, psi, grid, tol=self.tol)
        gap = float(np.max(np.abs(sample.phi_values - sample.psi_values)))
        self.check(gap <= PSI_BOUND, f"Phi and Psi differ by {gap} on the axes", **describe(x=x, y=y, psi=psi))
        return 4
