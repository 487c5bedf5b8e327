from enum import Enum as PyEnum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field, validator

from .linalg_core import round_sig


# Enums
class StateKind(str, PyEnum):
    VECTOR = "vector"
    DENSITY = "density"


class MeasurementOrder(str, PyEnum):
    XY = "XY"
    YX = "YX"


class HardyVerdict(str, PyEnum):
    NONLOCALITY_WITNESSED = "nonlocality_witnessed"
    BLOCKED_BY_TRANSITIVITY = "blocked_by_transitivity"
    PRODUCT_STATE = "product_state"
    CONDITIONS_UNMET = "conditions_unmet"


def clean_json(value):
    """Round floats to 15 significant digits throughout a JSON-ready structure"""
    if isinstance(value, float):
        return round_sig(value)
    if isinstance(value, dict):
        return {k: clean_json(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [clean_json(v) for v in value]
    if isinstance(value, PyEnum):
        return value.value
    return value


class ReportModel(BaseModel):
    class Config:
        allow_population_by_field_name = True
        use_enum_values = True

    def to_json(self) -> Dict[str, Any]:
        return clean_json(self.dict(by_alias=True))


# Correlation verdicts
class Witness(ReportModel):
    lambda_: float = Field(..., alias='lambda')
    mu: float
    magnitude: float


class CorrelationVerdict(ReportModel):
    correlated: bool
    witness: Optional[Witness] = None
    conditions: Dict[str, bool] = {}
    residuals: Dict[str, float] = {}

    @property
    def all_agree(self) -> bool:
        return len(set(self.conditions.values())) <= 1


class ConditionReport(ReportModel):
    holds: bool
    conditions: Dict[str, bool] = {}
    residuals: Dict[str, float] = {}
    details: Dict[str, Any] = {}

    @property
    def all_agree(self) -> bool:
        return len(set(self.conditions.values())) <= 1


# Joint distributions
class JointCell(ReportModel):
    x: float
    y: float
    p: float
    meet: Optional[float] = None


class JointDistributionRecord(ReportModel):
    present: bool
    cells: List[JointCell] = []
    violation: Optional[Witness] = None
    violation_value: Optional[List[float]] = None
    commutator_residual: Optional[float] = None
    off_diagonal_mass: Optional[float] = None


class OutcomeTally(ReportModel):
    label: float
    count: int
    frequency: float
    stderr: float
    probability: float


class PairTally(ReportModel):
    x: float
    y: float
    count: int
    frequency: float
    stderr: float
    probability: float


class SampledRun(ReportModel):
    n: int
    seed: Optional[int] = None
    order: Optional[MeasurementOrder] = None
    tallies: List[OutcomeTally] = []
    pair_tallies: List[PairTally] = []
    all_equal: Optional[bool] = None


# Bipartite
class HardyReport(ReportModel):
    p1: float
    condition_values: List[float]
    verdict: HardyVerdict
    correlation_chain: List[List[str]] = []


# Verifier
class SuiteFailure(ReportModel):
    trial: int
    message: str
    instance: Dict[str, Any] = {}


class SuiteResult(ReportModel):
    id: str
    trial_count: int
    dims: List[int] = []
    seed: int
    checks: int = 0
    failures: List[SuiteFailure] = []

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_json(self) -> Dict[str, Any]:
        data = super().to_json()
        data['passed'] = self.passed
        return data


# Workspace schema
def _check_rectangular(rows):
    if not rows:
        raise ValueError('matrix must have at least one row')
    width = len(rows[0])
    if width == 0 or any(len(row) != width for row in rows):
        raise ValueError('matrix rows must be non-empty and of equal length')
    return rows


class ObservableSpec(BaseModel):
    matrix: List[List[Any]]

    _rectangular = validator('matrix', allow_reuse=True)(_check_rectangular)


class StateSpec(BaseModel):
    vector: Optional[List[Any]] = None
    density: Optional[List[List[Any]]] = None

    @validator('density', always=True)
    def _exactly_one(cls, value, values):
        if (value is None) == (values.get('vector') is None):
            raise ValueError('a state needs exactly one of "vector" or "density"')
        return value


class PovmOutcomeSpec(BaseModel):
    label: float
    effect: List[List[Any]]


class PovmSpec(BaseModel):
    outcomes: List[PovmOutcomeSpec]


class ProcessSpec(BaseModel):
    probe_dim: int
    probe_state: List[Any]
    interaction: List[List[Any]]
    meter: List[List[Any]]

    @validator('probe_dim')
    def _positive_dim(cls, value):
        if value < 1:
            raise ValueError('probe_dim must be positive')
        return value


class InstrumentOutcomeSpec(BaseModel):
    label: float
    kraus: List[List[List[Any]]]


class InstrumentSpec(BaseModel):
    outcomes: List[InstrumentOutcomeSpec]


class WorkspaceFile(BaseModel):
    version: str = "1"
    observables: Dict[str, ObservableSpec] = {}
    states: Dict[str, StateSpec] = {}
    povms: Dict[str, PovmSpec] = {}
    processes: Dict[str, ProcessSpec] = {}
    instruments: Dict[str, InstrumentSpec] = {}

    @validator('version')
    def _known_version(cls, value):
        if value != "1":
            raise ValueError(f'unsupported workspace version: {value}')
        return value
