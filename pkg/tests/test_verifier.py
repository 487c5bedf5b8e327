import json
import time

import numpy as np
import pytest

from perfcorr import config
from perfcorr.correlation import is_perfectly_correlated
from perfcorr.errors import UnknownSuite
from perfcorr.suites import BaseSuite, get_suite, suite_ids
from perfcorr.verifier import engineer_correlated_pair, list_suites, replay_failure, run_all, run_suite

TRIALS = 2
SEED = 7


class FailsOnOddTrials(BaseSuite):
    dims = (2, 3)

    @property
    def suite_id(self):
        return 'T-odd'

    def run_trial(self, dim, rng):
        self.check(dim == 2, f"dimension {dim} rejected", value=float(rng.random()))
        return 2


@pytest.mark.parametrize('suite_id', suite_ids())
def test_suite_passes(suite_id):
    result = run_suite(suite_id, TRIALS, SEED)
    assert result.passed, [f.message for f in result.failures]
    assert result.trial_count == TRIALS
    assert result.checks > 0


@pytest.mark.slow
def test_full_run_at_default_trials():
    started = time.perf_counter()
    results = run_all(config.DEFAULT_TRIALS, config.DEFAULT_SEED)
    elapsed = time.perf_counter() - started
    failures = {r.id: [f.message for f in r.failures[:3]] for r in results if not r.passed}
    assert not failures
    assert all(r.trial_count == config.DEFAULT_TRIALS for r in results)
    assert elapsed < 60.0, f"full run took {elapsed:.1f} s"


def test_suite_ids_are_unique():
    ids = suite_ids()
    assert len(ids) == len(set(ids))
    assert 'S3-counterexample' in ids
    assert 'S9-implications' in ids


def test_list_suites():
    listed = list_suites()
    assert [s['id'] for s in listed] == suite_ids()
    assert all(s['description'] for s in listed)
    hardy = next(s for s in listed if s['id'] == 'S7-hardy-max')
    assert hardy['dims'] == [2]


@pytest.mark.parametrize('alias,expected', [
    ('transitivity', 'S5-transitivity'),
    ('S6_PC_JPD', 'S6-pcjpd'),
    ('s3 counterexample', 'S3-counterexample'),
])
def test_aliases(alias, expected):
    assert get_suite(alias).suite_id == expected


def test_unknown_suite():
    with pytest.raises(UnknownSuite):
        run_suite('S0-nothing', 1)


def test_runs_are_reproducible():
    first = run_suite('S5-transitivity', 3, 11)
    second = run_suite('S5-transitivity', 3, 11)
    assert json.dumps(first.to_json(), sort_keys=True) == json.dumps(second.to_json(), sort_keys=True)


def test_failures_record_their_trial():
    result = FailsOnOddTrials().run(trials=4, seed=5)
    assert not result.passed
    assert [f.trial for f in result.failures] == [1, 3]
    instance = result.failures[0].instance
    assert instance['suite'] == 'T-odd'
    assert (instance['seed'], instance['trial'], instance['dim']) == (5, 1, 3)
    assert 'value' in instance


def test_failure_replays_identically():
    suite = FailsOnOddTrials()
    failure = suite.run(trials=2, seed=5).failures[0]
    replayed = suite.replay(failure.instance)
    assert replayed.to_json() == failure.to_json()


def test_replay_of_passing_trial():
    record = {'suite': 'S3-counterexample', 'seed': SEED, 'trial': 0, 'dim': 4}
    assert replay_failure(json.dumps(record)) is None
    assert replay_failure({'trial': 0, 'message': 'old', 'instance': record}) is None


def test_replay_needs_a_complete_record():
    with pytest.raises(UnknownSuite):
        replay_failure({'suite': 'S3-counterexample', 'seed': 1})
    with pytest.raises(UnknownSuite):
        replay_failure({'suite': 'S0-nothing', 'seed': 1, 'trial': 0, 'dim': 2})


@pytest.mark.parametrize('dim', [2, 3, 5])
def test_engineered_pair_is_correlated(dim):
    x, y, rho = engineer_correlated_pair(dim, seed=dim, subspace_dim=1)
    assert is_perfectly_correlated(x, y, rho).correlated


def test_full_subspace_gives_equal_observables():
    x, y, _ = engineer_correlated_pair(3, seed=2, subspace_dim=3)
    assert np.allclose(x.matrix, y.matrix, atol=1e-10)
