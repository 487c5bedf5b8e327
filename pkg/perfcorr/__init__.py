from .errors import (
    DegenerateSpectrum,
    DimensionMismatch,
    IncompatiblePair,
    InvalidMatrix,
    InvalidPovm,
    InvalidState,
    LabelMismatch,
    NoConvergence,
    NotHermitian,
    PerfCorrError,
    SingularNormalizer,
    SpectrumNotBinary,
    UnknownSuite,
    WorkspaceError,
)
from .linalg_core import Subspace, ToleranceProfile, default_tolerances
from .states import QuantumState
from .spectral import HermitianObservable, Povm, RealFunction, RealSet
from .correlation import (
    check_equivalences_mixed,
    check_equivalences_vector,
    condition_taxonomy,
    is_perfectly_correlated,
    perfectly_correlative_domain,
)
from .joint_dist import joint_distribution, successive_measurement
from .bipartite import entanglement, hardy_check, hardy_search, schmidt
from .povm_dilation import joint_dilate, naimark_dilate, povm_perfectly_correlated
from .measurement import Instrument, MeasuringProcess, measure, von_neumann_model
from .verifier import replay_failure, run_all, run_suite
from .workspace import Workspace, load_workspace, parse_workspace

__all__ = [
    'PerfCorrError',
    'InvalidMatrix',
    'NotHermitian',
    'NoConvergence',
    'DimensionMismatch',
    'SingularNormalizer',
    'InvalidState',
    'InvalidPovm',
    'SpectrumNotBinary',
    'IncompatiblePair',
    'LabelMismatch',
    'DegenerateSpectrum',
    'UnknownSuite',
    'WorkspaceError',
    'Subspace',
    'ToleranceProfile',
    'default_tolerances',
    'QuantumState',
    'HermitianObservable',
    'Povm',
    'RealFunction',
    'RealSet',
    'check_equivalences_mixed',
    'check_equivalences_vector',
    'condition_taxonomy',
    'is_perfectly_correlated',
    'perfectly_correlative_domain',
    'joint_distribution',
    'successive_measurement',
    'entanglement',
    'hardy_check',
    'hardy_search',
    'schmidt',
    'joint_dilate',
    'naimark_dilate',
    'povm_perfectly_correlated',
    'Instrument',
    'MeasuringProcess',
    'measure',
    'von_neumann_model',
    'replay_failure',
    'run_all',
    'run_suite',
    'Workspace',
    'load_workspace',
    'parse_workspace'
]
