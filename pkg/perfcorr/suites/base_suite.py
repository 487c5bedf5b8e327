import logging
from abc import ABC, abstractmethod
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from .. import config
from ..errors import PerfCorrError, UnknownSuite
from ..linalg_core import ToleranceProfile, resolve_tol
from ..models import SuiteFailure, SuiteResult

logger = logging.getLogger(__name__)


class TrialFailure(Exception):
    """Raised inside a trial when a checked relation does not hold"""

    def __init__(self, message: str, instance: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.instance = instance or {}


class BaseSuite(ABC):
    """Base class for a seeded family of checks on one group of results"""

    dims: Sequence[int] = (2, 3, 4)

    def __init__(self, tol: Optional[ToleranceProfile] = None):
        self.tol = resolve_tol(tol)

    @property
    @abstractmethod
    def suite_id(self) -> str:
        """Registry id, e.g. S5-transitivity"""
        pass

    @property
    def description(self) -> str:
        return ''

    @abstractmethod
    def run_trial(self, dim: int, rng: np.random.Generator) -> int:
        """Run one trial and return the number of checks made; raise TrialFailure on a violation"""
        pass

    def check(self, condition: bool, message: str, **instance):
        if not condition:
            raise TrialFailure(message, instance)

    @staticmethod
    def trial_rng(seed: int, trial: int) -> np.random.Generator:
        return np.random.default_rng([seed, trial])

    def _trial(self, trial: int, dim: int, seed: int) -> Optional[SuiteFailure]:
        base = {'suite': self.suite_id, 'seed': seed, 'trial': trial, 'dim': dim}
        try:
            self._checks += self.run_trial(dim, self.trial_rng(seed, trial))
        except TrialFailure as e:
            return SuiteFailure(trial=trial, message=str(e), instance={**base, **e.instance})
        except PerfCorrError as e:
            return SuiteFailure(trial=trial, message=f"{type(e).__name__}: {e}", instance=base)
        return None

    def run(self, trials: Optional[int] = None, seed: Optional[int] = None,
            dims: Optional[Sequence[int]] = None) -> SuiteResult:
        """Run ``trials`` trials cycling through ``dims``; trial t draws from the generator seeded by (seed, t)"""
        trials = config.DEFAULT_TRIALS if trials is None else trials
        seed = config.DEFAULT_SEED if seed is None else seed
        dims = list(dims or self.dims)
        self._checks = 0
        failures: List[SuiteFailure] = []
        for trial in range(trials):
            failure = self._trial(trial, dims[trial % len(dims)], seed)
            if failure is not None:
                logger.warning("Suite %s trial %d failed: %s", self.suite_id, trial, failure.message)
                failures.append(failure)
        logger.info("Suite %s ran %d trials with %d checks and %d failures",
                    self.suite_id, trials, self._checks, len(failures))
        return SuiteResult(id=self.suite_id, trial_count=trials, dims=dims, seed=seed,
                           checks=self._checks, failures=failures)

    def replay(self, instance: Dict[str, Any]) -> Optional[SuiteFailure]:
        """Re-run the trial named by a failure's instance record"""
        self._checks = 0
        return self._trial(int(instance['trial']), int(instance['dim']), int(instance['seed']))


def _registry() -> Dict[str, type]:
    from .definitions import PropositionSuite, TransportSuite
    from .pure_states import (
        BornSuite,
        CounterexampleSuite,
        IdenticalNotCorrelatedSuite,
        MixedEquivalenceSuite,
        SuperpositionSuite,
        VectorEquivalenceSuite,
    )
    from .dilations import DistancePovmSuite, JointDilationSuite, PovmObservableSuite
    from .domains import LargestDomainSuite, TransitivitySuite
    from .joint import (
        CharacteristicPhiSuite,
        CharacteristicPsiSuite,
        JointDistributionSuite,
        JointMeasurabilitySuite,
        DiagonalConcentrationSuite,
    )
    from .entanglement import BipartiteCharacterizationSuite, HardyMaximalSuite
    from .measurements import ModelSuite, PreciseMeasurementSuite, TwoOfThreeSuite
    from .implications import ImplicationSuite

    suites = [
        PropositionSuite, TransportSuite,
        VectorEquivalenceSuite, MixedEquivalenceSuite, BornSuite, SuperpositionSuite,
        CounterexampleSuite, IdenticalNotCorrelatedSuite,
        JointDilationSuite, DistancePovmSuite, PovmObservableSuite,
        LargestDomainSuite, TransitivitySuite,
        JointDistributionSuite, JointMeasurabilitySuite, DiagonalConcentrationSuite,
        CharacteristicPhiSuite, CharacteristicPsiSuite,
        BipartiteCharacterizationSuite, HardyMaximalSuite,
        PreciseMeasurementSuite, ModelSuite, TwoOfThreeSuite,
        ImplicationSuite,
    ]
    return {cls().suite_id.lower(): cls for cls in suites}


ALIASES = {
    'proposition': 's2-proposition',
    'transport': 's2-transport',
    'vector': 's3-vector-equivalence',
    'mixed': 's3-mixed',
    'born': 's3-born',
    'scece': 's3-scece',
    'superposition': 's3-scece',
    'counterexample': 's3-counterexample',
    'identical-not-correlated': 's3-identical-not-correlated',
    'joint-dilation': 's4-joint-dilation',
    'distance-povm': 's4-distance-povm',
    'pc-state3': 's4-pc-state3',
    'largest': 's5-largest',
    'transitivity': 's5-transitivity',
    'jpd': 's6-jpd',
    'jm': 's6-jm',
    'pcjpd': 's6-pcjpd',
    'pc-jpd': 's6-pcjpd',
    's6-pc-jpd': 's6-pcjpd',
    'phi': 's6-phi',
    'psi': 's6-psi',
    'characterization': 's7-characterization',
    'hardy': 's7-hardy-max',
    'hardy-max': 's7-hardy-max',
    'precise': 's8-precise',
    'model': 's8-model',
    'two-of-three': 's8-two-of-three',
    'implications': 's9-implications',
}


def suite_ids() -> List[str]:
    return [cls().suite_id for cls in _registry().values()]


def get_suite(suite_id: str, tol: Optional[ToleranceProfile] = None) -> BaseSuite:
    """Factory function to get the suite registered under an id or alias"""
    registry = _registry()
    normalized = suite_id.strip().lower().replace(' ', '-').replace('_', '-')
    normalized = ALIASES.get(normalized, normalized)
    if normalized not in registry:
        raise UnknownSuite(f"Unsupported suite id: {suite_id}")
    return registry[normalized](tol)
