import logging
import os
from dotenv import load_dotenv

# Load environment variables
load_dotenv()

# Numerical tolerances
TOL_INPUT = float(os.getenv('PERFCORR_TOL_INPUT', '1e-10'))
TOL_CLUSTER = float(os.getenv('PERFCORR_TOL_CLUSTER', '1e-8'))
TOL_ZERO = float(os.getenv('PERFCORR_TOL_ZERO', '1e-9'))
TOL_PROB = float(os.getenv('PERFCORR_TOL_PROB', '1e-9'))
TOL_ORTHO = float(os.getenv('PERFCORR_TOL_ORTHO', '1e-10'))

# Iteration caps
JACOBI_MAX_SWEEPS = int(os.getenv('PERFCORR_JACOBI_MAX_SWEEPS', '60'))
RANDOM_RETRIES = int(os.getenv('PERFCORR_RANDOM_RETRIES', '8'))

# CLI / verifier defaults
LOG_LEVEL = os.getenv('PERFCORR_LOG_LEVEL', 'WARNING').upper()
ENTROPY_BASE = os.getenv('PERFCORR_ENTROPY_BASE', 'e')
DEFAULT_TRIALS = int(os.getenv('PERFCORR_DEFAULT_TRIALS', '200'))
DEFAULT_SEED = int(os.getenv('PERFCORR_DEFAULT_SEED', '7'))

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


def configure_logging(level=None):
    """Configure root logging for command line entry points"""
    logging.basicConfig(level=getattr(logging, (level or LOG_LEVEL).upper(), logging.WARNING),
                        format=LOG_FORMAT)
