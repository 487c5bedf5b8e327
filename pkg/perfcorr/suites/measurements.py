import numpy as np

from ..linalg_core import random_density
from ..measurement import (
    Instrument,
    MeasuringProcess,
    instrument_of,
    measure,
    model_characterization,
    povm_of,
    precisely_measures,
    realize_instrument,
    repeatability_trial,
    statistically_equivalent,
    two_of_three,
    von_neumann_model,
)
from ..states import QuantumState
from .base_suite import BaseSuite
from .instances import describe, random_instrument, random_observable, random_process, random_state

REPEATS = 500


def _random_phases(dim: int, rng: np.random.Generator):
    return list(np.exp(2j * np.pi * rng.random(dim)))


class PreciseMeasurementSuite(BaseSuite):
    """The dilated, POVM and Born-statistics criteria for precise measurement agree"""

    @property
    def suite_id(self):
        return 'S8-precise'

    def _swapped_register(self, rng) -> int:
        """An apparatus for I (x) X tested against X (x) I in sigma (x) sigma"""
        local = random_observable(2, rng, self.tol, distinct=True)
        sigma = 0.5 * random_density(2, rng, 2) + 0.25 * np.eye(2)
        rho = QuantumState(density=np.kron(sigma, sigma), tol=self.tol)
        b = local.extend(2, 'left')
        mp = realize_instrument(Instrument([(v, [p]) for v, p in b.spectrum], self.tol), self.tol)
        report = precisely_measures(mp, local.extend(2, 'right'), rho, self.tol)
        self.check(report.details['bsf_on_state'], "Born statistics differ on the symmetric state",
                   **describe(x=local, rho=rho))
        self.check(not report.conditions['a'] and not report.conditions['b'] and report.all_agree,
                   f"apparatus for the other register passed: {report.conditions}", **describe(x=local, rho=rho))
        return 2

    def run_trial(self, dim, rng):
        a = random_observable(dim, rng, self.tol, distinct=True)
        rho = random_state(dim, rng, tol=self.tol)
        mp = von_neumann_model(a, _random_phases(dim, rng), self.tol)
        report = precisely_measures(mp, a, rho, self.tol)
        self.check(report.holds and report.all_agree, f"model of A: conditions {report.conditions}",
                   **describe(a=a, rho=rho, mp=mp))

        mp = random_process(dim, rng, self.tol)
        report = precisely_measures(mp, a, rho, self.tol)
        self.check(report.all_agree, f"random process: conditions {report.conditions}",
                   **describe(a=a, rho=rho, mp=mp))

        instrument = random_instrument(dim, rng, self.tol)
        realized = realize_instrument(instrument, self.tol)
        self.check(statistically_equivalent(realized, instrument, self.tol), "realized instrument differs",
                   **describe(instrument=instrument))
        records = measure(realized, rho, self.tol)
        povm = povm_of(instrument)
        gap = max(abs(r.probability - rho.expectation(povm.effect_at(r.label)).real) for r in records)
        self.check(gap <= 10 * self.tol.tol_prob, f"output distribution off by {gap}",
                   **describe(instrument=instrument, rho=rho))
        return 4 + self._swapped_register(rng)


class ModelSuite(BaseSuite):
    """The repeatable model satisfies the slice equation and is characterized by two correlations"""

    @property
    def suite_id(self):
        return 'S8-model'

    def run_trial(self, dim, rng):
        a = random_observable(dim, rng, self.tol, distinct=True)
        phases = _random_phases(dim, rng)
        mp = von_neumann_model(a, phases, self.tol)
        report = model_characterization(mp, a, seed=int(rng.integers(2 ** 31)), tol=self.tol)
        self.check(report.holds and report.conditions['slice'] and report.details['nondemolition'],
                   f"model conditions {report.conditions}", **describe(a=a, mp=mp))
        found = [complex(re, im) for re, im in report.details['phases']]
        self.check(np.allclose(found, phases, atol=1e-9), f"extracted phases {found}", **describe(a=a, mp=mp))

        flipped = von_neumann_model(a, [(-1.0) ** n for n in range(dim)], self.tol)
        self.check(statistically_equivalent(von_neumann_model(a, tol=self.tol), flipped, self.tol),
                   "phase choice changed the instrument", **describe(a=a))

        rho = random_state(dim, rng, tol=self.tol)
        for record in measure(mp, rho, self.tol):
            born = rho.expectation(a.projector_at(record.label)).real
            self.check(abs(record.probability - born) <= 10 * self.tol.tol_prob,
                       f"outcome {record.label}: {record.probability} vs Born {born}", **describe(a=a, rho=rho))
        run = repeatability_trial(mp, rho, REPEATS, seed=int(rng.integers(2 ** 31)), tol=self.tol)
        self.check(run.all_equal, "repeated measurement disagreed", **describe(a=a, rho=rho))

        idle = MeasuringProcess(mp.probe_state, np.eye(dim * dim), mp.meter, self.tol)
        report = model_characterization(idle, a, seed=int(rng.integers(2 ** 31)), tol=self.tol)
        self.check(not report.holds, "idle interaction passed as a model", **describe(a=a))
        return 6


class TwoOfThreeSuite(BaseSuite):
    """Any two of value reproduction, repeatability and nondemolition give the third"""

    @property
    def suite_id(self):
        return 'S8-two-of-three'

    def run_trial(self, dim, rng):
        a = random_observable(dim, rng, self.tol, distinct=True)
        rho = random_state(dim, rng, tol=self.tol)
        report = two_of_three(von_neumann_model(a, _random_phases(dim, rng), self.tol), a, rho, self.tol)
        self.check(report.holds and all(report.conditions.values()), f"model of A: {report.conditions}",
                   **describe(a=a, rho=rho))

        mp = random_process(dim, rng, self.tol)
        report = two_of_three(mp, a, rho, self.tol)
        self.check(report.holds, f"implications broken: {report.details['implications']}",
                   **describe(a=a, rho=rho, mp=mp))

        # a process built from A's own projective instrument is repeatable
        projective = Instrument([(v, [p]) for v, p in a.spectrum], self.tol)
        report = two_of_three(realize_instrument(projective, self.tol), a, rho, self.tol)
        self.check(report.holds and report.conditions['value_reproducing'],
                   f"projective instrument of A: {report.conditions}", **describe(a=a, rho=rho))
        self.check(statistically_equivalent(instrument_of(realize_instrument(projective, self.tol), self.tol),
                                            projective, self.tol),
                   "projective instrument did not survive realization", **describe(a=a))
        return 4
