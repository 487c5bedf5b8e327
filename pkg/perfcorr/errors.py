"""Exception hierarchy shared by every perfcorr module."""


class PerfCorrError(ValueError):
    """Base class for all toolkit errors"""


class InvalidMatrix(PerfCorrError):
    """Matrix is not 2-D, has the wrong shape, or holds NaN/Inf entries"""


class NotHermitian(PerfCorrError):
    pass


class NoConvergence(PerfCorrError):
    """Iterative solver hit its iteration cap"""


class DimensionMismatch(PerfCorrError):
    pass


class SingularNormalizer(PerfCorrError):
    """Random POVM normalizer stayed singular after the retry cap"""


class InvalidState(PerfCorrError):
    pass


class InvalidPovm(PerfCorrError):
    pass


class SpectrumNotBinary(PerfCorrError):
    pass


class IncompatiblePair(PerfCorrError):
    """Observables have no joint distribution in the given state"""


class LabelMismatch(PerfCorrError):
    pass


class DegenerateSpectrum(PerfCorrError):
    pass


class UnknownSuite(PerfCorrError):
    pass


class WorkspaceError(PerfCorrError):
    """Workspace file is malformed or references an unknown name"""
