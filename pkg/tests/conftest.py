import os
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from perfcorr.linalg_core import default_tolerances
from perfcorr.spectral import HermitianObservable
from perfcorr.states import QuantumState
from perfcorr.workspace import load_workspace

FIXTURES = Path(__file__).resolve().parent.parent / 'fixtures'

SIGMA_Z = np.diag([1.0, -1.0]).astype(complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
IDENTITY_2 = np.eye(2, dtype=complex)
BELL = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)


@pytest.fixture
def tol():
    return default_tolerances()


@pytest.fixture
def rng():
    return np.random.default_rng(20240501)


@pytest.fixture
def fixture_path():
    def path(name):
        return FIXTURES / name
    return path


@pytest.fixture
def workspace():
    def load(name):
        return load_workspace(FIXTURES / name)
    return load


@pytest.fixture
def bell_pair(tol):
    """sigma_z (x) I, I (x) sigma_z, I (x) sigma_x and the Bell state"""
    sz_a = HermitianObservable(np.kron(SIGMA_Z, IDENTITY_2), tol)
    sz_b = HermitianObservable(np.kron(IDENTITY_2, SIGMA_Z), tol)
    sx_b = HermitianObservable(np.kron(IDENTITY_2, SIGMA_X), tol)
    return sz_a, sz_b, sx_b, QuantumState(vector=BELL, tol=tol)
