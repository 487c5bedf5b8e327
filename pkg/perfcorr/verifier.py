"""
Seeded theorem suites: run them, list them and replay their failures.

Every suite draws trial t from the generator seeded by (seed, t), so a
failure record naming suite, seed, trial and dim reproduces exactly.
"""
import json
import logging
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from .errors import UnknownSuite
from .linalg_core import RngLike, ToleranceProfile, make_rng
from .models import SuiteFailure, SuiteResult
from .spectral import HermitianObservable
from .states import QuantumState
from .suites import get_suite, suite_ids
from .suites import instances

logger = logging.getLogger(__name__)


def run_suite(suite_id: str, trials: Optional[int] = None, seed: Optional[int] = None,
              dims: Optional[Sequence[int]] = None, tol: Optional[ToleranceProfile] = None) -> SuiteResult:
    """
    Run a registered suite.

    Raises:
        UnknownSuite: if no suite is registered under the id or alias
    """
    suite = get_suite(suite_id, tol)
    logger.info("Running suite %s", suite.suite_id)
    return suite.run(trials, seed, dims)


def run_all(trials: Optional[int] = None, seed: Optional[int] = None,
            tol: Optional[ToleranceProfile] = None) -> List[SuiteResult]:
    return [run_suite(sid, trials, seed, tol=tol) for sid in suite_ids()]


def list_suites() -> List[Dict[str, Any]]:
    out = []
    for sid in suite_ids():
        suite = get_suite(sid)
        doc = (type(suite).__doc__ or '').strip()
        out.append({'id': suite.suite_id, 'dims': list(suite.dims), 'description': suite.description or doc})
    return out


def engineer_correlated_pair(dim: int, seed: RngLike = None, subspace_dim: Optional[int] = None,
                             tol: Optional[ToleranceProfile] = None
                             ) -> Tuple[HermitianObservable, HermitianObservable, QuantumState]:
    """
    X and Y equal on a random subspace S and independent on its complement,
    with a state supported in S. With subspace_dim == dim the two coincide.
    """
    x, y, rho, _ = instances.engineer_correlated_pair(dim, make_rng(seed), subspace_dim, tol)
    return x, y, rho


def _failure_instance(serialized: Union[str, Dict[str, Any]]) -> Dict[str, Any]:
    data = json.loads(serialized) if isinstance(serialized, str) else dict(serialized)
    instance = data.get('instance', data)
    missing = [key for key in ('suite', 'seed', 'trial', 'dim') if key not in instance]
    if missing:
        raise UnknownSuite(f"Failure record is missing {', '.join(missing)}")
    return instance


def replay_failure(serialized: Union[str, Dict[str, Any]],
                   tol: Optional[ToleranceProfile] = None) -> Optional[SuiteFailure]:
    """
    Re-run the trial a failure record names.

    Accepts a SuiteFailure (as a dict or JSON string) or its bare instance
    record. Returns the reproduced failure, or None if the trial now passes.
    """
    instance = _failure_instance(serialized)
    suite = get_suite(str(instance['suite']), tol)
    failure = suite.replay(instance)
    if failure is None:
        logger.info("Replayed trial %s of %s passes", instance['trial'], instance['suite'])
    return failure
