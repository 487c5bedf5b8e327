from .base_suite import BaseSuite, TrialFailure, get_suite, suite_ids
from .instances import (
    counterexample,
    describe,
    engineer_compatible_pair,
    engineer_correlated_pair,
    engineer_correlated_povm,
    product_pair,
    random_instrument,
    random_observable,
    random_povm,
    random_process,
    random_state,
)

__all__ = [
    'BaseSuite',
    'TrialFailure',
    'get_suite',
    'suite_ids',
    'counterexample',
    'describe',
    'engineer_compatible_pair',
    'engineer_correlated_pair',
    'engineer_correlated_povm',
    'product_pair',
    'random_instrument',
    'random_observable',
    'random_povm',
    'random_process',
    'random_state'
]
