"""
Spectral measures and functional calculus in finite dimension.

Observables are stored as a clustered spectral decomposition: a list of
distinct spectral values with their orthogonal eigenprojectors. POVMs are
finite lists of labeled effects.
"""
import logging
import math
from enum import Enum as PyEnum
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, Field, validator

from .errors import DimensionMismatch, InvalidPovm, LabelMismatch
from .linalg_core import (
    Subspace,
    ToleranceProfile,
    as_matrix,
    dagger,
    default_tolerances,
    eig_hermitian,
    hermitian_part,
    is_hermitian,
    is_isometry,
    largest_common_kernel,
    matrix_from_json,
    matrix_to_json,
    max_abs,
    resolve_tol,
    round_sig,
    tensor,
)
from .states import QuantumState

logger = logging.getLogger(__name__)

Interval = Tuple[Optional[float], Optional[float]]


def _lo(a: Optional[float]) -> float:
    return -math.inf if a is None else a


def _hi(b: Optional[float]) -> float:
    return math.inf if b is None else b


# ---------------------------------------------------------------------------
# Real sets and functions
# ---------------------------------------------------------------------------

class RealSet(BaseModel):
    """Finite union of half-open intervals [a, b) and isolated points; None is an infinite endpoint"""
    intervals: List[Interval] = []
    points: List[float] = []

    @validator('intervals')
    def _normalize_intervals(cls, value):
        spans = []
        for a, b in value:
            if not _lo(a) < _hi(b):
                raise ValueError(f'interval [{a}, {b}) is empty')
            spans.append((_lo(a), _hi(b)))
        spans.sort()
        merged: List[List[float]] = []
        for a, b in spans:
            if merged and a <= merged[-1][1]:
                merged[-1][1] = max(merged[-1][1], b)
            else:
                merged.append([a, b])
        return [(None if math.isinf(a) else a, None if math.isinf(b) else b) for a, b in merged]

    @validator('points')
    def _drop_interior_points(cls, value, values):
        intervals = values.get('intervals') or []
        kept = []
        for p in sorted(set(float(x) for x in value)):
            if not any(_lo(a) <= p < _hi(b) for a, b in intervals):
                kept.append(p)
        return kept

    @classmethod
    def full_line(cls) -> 'RealSet':
        return cls(intervals=[(None, None)])

    @classmethod
    def empty(cls) -> 'RealSet':
        return cls()

    @classmethod
    def singleton(cls, x: float) -> 'RealSet':
        return cls(points=[float(x)])

    @classmethod
    def from_points(cls, xs: Iterable[float]) -> 'RealSet':
        return cls(points=[float(x) for x in xs])

    @classmethod
    def interval(cls, a: Optional[float], b: Optional[float]) -> 'RealSet':
        return cls(intervals=[(a, b)])

    @property
    def is_empty(self) -> bool:
        return not self.intervals and not self.points

    def contains(self, x: float, tol: Optional[float] = None) -> bool:
        """Membership; points and interval edges are matched within ``tol``"""
        if tol is None:
            tol = default_tolerances().tol_cluster
        x = float(x)
        for a, b in self.intervals:
            if _lo(a) - tol <= x < _hi(b) - tol:
                return True
        return any(abs(x - p) <= tol for p in self.points)

    def union(self, other: 'RealSet') -> 'RealSet':
        return RealSet(intervals=self.intervals + other.intervals, points=self.points + other.points)

    def intersect_points(self, xs: Iterable[float], tol: Optional[float] = None) -> List[float]:
        return [float(x) for x in xs if self.contains(x, tol)]

    def complement_points(self, spectrum: Iterable[float], tol: Optional[float] = None) -> 'RealSet':
        """Points of a finite spectrum lying outside this set"""
        return RealSet.from_points(x for x in spectrum if not self.contains(x, tol))

    def to_json(self) -> dict:
        return {'intervals': [[None if a is None else round_sig(a), None if b is None else round_sig(b)]
                              for a, b in self.intervals],
                'points': [round_sig(p) for p in self.points]}

    @classmethod
    def from_json(cls, data: dict) -> 'RealSet':
        return cls.parse_obj(data)


class FunctionKind(str, PyEnum):
    POLY = "poly"
    INDICATOR = "indicator"
    NAMED = "named"
    COMPOSITE = "composite"


NAMED_FUNCTIONS: Dict[str, Callable[[np.ndarray], np.ndarray]] = {
    'id': lambda t: t,
    'abs': np.abs,
    'arctan': np.arctan,
}


class RealFunction(BaseModel):
    """
    A real function with a symbolic tag.

    ``coeffs`` are polynomial coefficients in ascending order. A composite
    holds ``parts`` [f, g, ...] and evaluates as f(g(...)).
    """
    kind: FunctionKind
    coeffs: Optional[List[float]] = None
    set_: Optional[RealSet] = Field(None, alias='set')
    name: Optional[str] = None
    parts: Optional[List['RealFunction']] = None

    class Config:
        allow_population_by_field_name = True

    @validator('parts', always=True)
    def _fields_match_kind(cls, value, values):
        kind = values.get('kind')
        if kind == FunctionKind.POLY and not values.get('coeffs'):
            raise ValueError('poly functions need coefficients')
        if kind == FunctionKind.INDICATOR and values.get('set_') is None:
            raise ValueError('indicator functions need a set')
        if kind == FunctionKind.NAMED and values.get('name') not in NAMED_FUNCTIONS:
            raise ValueError(f"unknown named function: {values.get('name')}")
        if kind == FunctionKind.COMPOSITE and not value:
            raise ValueError('composite functions need parts')
        return value

    # constructors
    @classmethod
    def identity(cls) -> 'RealFunction':
        return cls(kind=FunctionKind.NAMED, name='id')

    @classmethod
    def named(cls, name: str) -> 'RealFunction':
        return cls(kind=FunctionKind.NAMED, name=name)

    @classmethod
    def poly(cls, coeffs: Sequence[float]) -> 'RealFunction':
        return cls(kind=FunctionKind.POLY, coeffs=[float(c) for c in coeffs])

    @classmethod
    def power(cls, n: int) -> 'RealFunction':
        return cls.poly([0.0] * n + [1.0])

    @classmethod
    def affine(cls, slope: float, intercept: float = 0.0) -> 'RealFunction':
        return cls.poly([intercept, slope])

    @classmethod
    def constant(cls, c: float) -> 'RealFunction':
        return cls.poly([c])

    @classmethod
    def indicator(cls, s: RealSet) -> 'RealFunction':
        return cls(kind=FunctionKind.INDICATOR, set_=s)

    def compose(self, inner: 'RealFunction') -> 'RealFunction':
        """The function self o inner"""
        if self.is_identity:
            return inner
        if inner.is_identity:
            return self
        return RealFunction(kind=FunctionKind.COMPOSITE, parts=[self, inner])

    @property
    def is_identity(self) -> bool:
        if self.kind == FunctionKind.NAMED:
            return self.name == 'id'
        if self.kind == FunctionKind.POLY:
            c = list(self.coeffs) + [0.0, 0.0]
            return c[0] == 0.0 and c[1] == 1.0 and not any(c[2:])
        return False

    def __call__(self, t):
        arr = np.asarray(t, dtype=float)
        if self.kind == FunctionKind.POLY:
            out = np.zeros_like(arr)
            for c in reversed(self.coeffs):
                out = out * arr + c
            return out
        if self.kind == FunctionKind.INDICATOR:
            flat = [1.0 if self.set_.contains(x) else 0.0 for x in arr.reshape(-1)]
            return np.array(flat, dtype=float).reshape(arr.shape)
        if self.kind == FunctionKind.NAMED:
            return np.asarray(NAMED_FUNCTIONS[self.name](arr), dtype=float)
        out = arr
        for part in reversed(self.parts):
            out = part(out)
        return out

    def is_injective_on(self, values: Sequence[float], tol: Optional[float] = None) -> bool:
        if tol is None:
            tol = default_tolerances().tol_cluster
        images = np.sort(np.asarray(self(np.asarray(values, dtype=float))).reshape(-1))
        return bool(np.all(np.diff(images) > tol))

    def preimage(self, s: RealSet, spectrum: Optional[Sequence[float]] = None) -> RealSet:
        """
        f^{-1}(s).

        Computed symbolically for the identity, increasing affine maps and
        arctan. Anything else is resolved pointwise over ``spectrum``.
        """
        if self.is_identity:
            return s
        if self.kind == FunctionKind.POLY and len(self.coeffs) == 2 and self.coeffs[1] > 0:
            c0, c1 = self.coeffs
            inv = lambda v: None if v is None else (v - c0) / c1
            return RealSet(intervals=[(inv(a), inv(b)) for a, b in s.intervals],
                           points=[(p - c0) / c1 for p in s.points])
        if self.kind == FunctionKind.NAMED and self.name == 'arctan':
            half_pi = math.pi / 2
            intervals = []
            for a, b in s.intervals:
                lo = None if _lo(a) <= -half_pi else math.tan(a)
                hi = None if _hi(b) >= half_pi else math.tan(b)
                if _lo(lo) < _hi(hi):
                    intervals.append((lo, hi))
            points = [math.tan(p) for p in s.points if -half_pi < p < half_pi]
            return RealSet(intervals=intervals, points=points)
        if spectrum is None:
            raise ValueError(f"Preimage under a {self.kind.value} function needs a finite spectrum")
        return RealSet.from_points(x for x in spectrum if s.contains(float(self(x))))

    def to_json(self) -> dict:
        if self.kind == FunctionKind.POLY:
            return {'kind': 'poly', 'coeffs': [round_sig(c) for c in self.coeffs]}
        if self.kind == FunctionKind.INDICATOR:
            return {'kind': 'indicator', 'set': self.set_.to_json()}
        if self.kind == FunctionKind.NAMED:
            return {'kind': 'named', 'name': self.name}
        return {'kind': 'composite', 'parts': [p.to_json() for p in self.parts]}

    @classmethod
    def from_json(cls, data: dict) -> 'RealFunction':
        return cls.parse_obj(data)


RealFunction.update_forward_refs()


def probe_functions(values: Iterable[float]) -> List[Tuple[str, RealFunction]]:
    """Indicators of each spectral point plus id, t^2 and arctan"""
    probes = [(f"1[{round_sig(v, 12)}]", RealFunction.indicator(RealSet.singleton(v))) for v in values]
    probes.append(('id', RealFunction.identity()))
    probes.append(('t^2', RealFunction.power(2)))
    probes.append(('arctan', RealFunction.named('arctan')))
    return probes


# ---------------------------------------------------------------------------
# Observables
# ---------------------------------------------------------------------------

def _cluster(values: np.ndarray, vectors: np.ndarray, width: float) -> List[Tuple[float, np.ndarray]]:
    groups: List[List[int]] = []
    for k in range(len(values)):
        if groups and values[k] - values[groups[-1][-1]] <= width:
            groups[-1].append(k)
        else:
            groups.append([k])
    spectrum = []
    for g in groups:
        v = vectors[:, g]
        spectrum.append((float(np.mean(values[g])), v @ dagger(v)))
    return spectrum


def merge_spectrum(pairs: Iterable[Tuple[float, np.ndarray]], width: float) -> List[Tuple[float, np.ndarray]]:
    """Sort (value, projector) pairs and sum projectors of values closer than ``width``"""
    ordered = sorted(pairs, key=lambda pair: pair[0])
    merged: List[List] = []
    for value, proj in ordered:
        if merged and value - merged[-1][2] <= width:
            merged[-1][1] = merged[-1][1] + proj
            merged[-1][3].append(value)
            merged[-1][2] = value
        else:
            merged.append([value, proj, value, [value]])
    return [(float(np.mean(vals)), proj) for _, proj, _, vals in merged]


class HermitianObservable:
    """A Hermitian matrix together with its clustered spectral decomposition"""

    def __init__(self, matrix, tol: Optional[ToleranceProfile] = None):
        tol = resolve_tol(tol)
        m = as_matrix(matrix, square=True)
        values, vectors = eig_hermitian(m, tol)
        norm = float(np.max(np.abs(values)))
        self.matrix = hermitian_part(m)
        self.dim = m.shape[0]
        self.spectrum = _cluster(values, vectors, tol.cluster_for(norm))
        self._tol = tol
        logger.debug("Observable of dimension %d has %d spectral points", self.dim, len(self.spectrum))

    @classmethod
    def from_spectrum(cls, pairs: Iterable[Tuple[float, np.ndarray]],
                      tol: Optional[ToleranceProfile] = None) -> 'HermitianObservable':
        """Build from known (value, projector) pairs without an eigensolve"""
        tol = resolve_tol(tol)
        pairs = [(float(v), np.asarray(p, dtype=complex)) for v, p in pairs]
        if not pairs:
            raise ValueError("An observable needs at least one spectral point")
        norm = max(abs(v) for v, _ in pairs)
        obs = cls.__new__(cls)
        obs.spectrum = [(v, hermitian_part(p)) for v, p in merge_spectrum(pairs, tol.cluster_for(norm))]
        obs.dim = pairs[0][1].shape[0]
        obs.matrix = sum(v * p for v, p in obs.spectrum)
        obs._tol = tol
        return obs

    @classmethod
    def diagonal(cls, values: Sequence[float], tol=None) -> 'HermitianObservable':
        d = len(values)
        return cls.from_spectrum([(values[k], np.diag(np.eye(d)[k])) for k in range(d)], tol)

    @property
    def values(self) -> List[float]:
        return [v for v, _ in self.spectrum]

    @property
    def projectors(self) -> List[np.ndarray]:
        return [p for _, p in self.spectrum]

    @property
    def norm(self) -> float:
        return max(abs(v) for v in self.values)

    @property
    def cluster_width(self) -> float:
        return self._tol.cluster_for(self.norm)

    def projector_at(self, value: float, width: Optional[float] = None) -> np.ndarray:
        """E^X({value}); zero when value is not a spectral point"""
        width = self.cluster_width if width is None else width
        for v, p in self.spectrum:
            if abs(v - value) <= width:
                return p
        return np.zeros((self.dim, self.dim), dtype=complex)

    def function_matrix(self, f: Callable) -> np.ndarray:
        """f(X) = sum f(lambda_i) P_i"""
        return sum(float(f(v)) * p for v, p in self.spectrum)

    def is_nondegenerate(self) -> bool:
        return len(self.spectrum) == self.dim

    def has_spectrum_in(self, allowed: Sequence[float]) -> bool:
        return all(any(abs(v - a) <= self.cluster_width for a in allowed) for v in self.values)

    def conjugate(self, u) -> 'HermitianObservable':
        """U^dagger X U"""
        u = np.asarray(u, dtype=complex)
        return HermitianObservable.from_spectrum([(v, dagger(u) @ p @ u) for v, p in self.spectrum], self._tol)

    def extend(self, other_dim: int, side: str = 'right') -> 'HermitianObservable':
        """X (x) I when side='right', I (x) X when side='left'"""
        ident = np.eye(other_dim)
        if side == 'right':
            pairs = [(v, tensor(p, ident)) for v, p in self.spectrum]
        else:
            pairs = [(v, tensor(ident, p)) for v, p in self.spectrum]
        return HermitianObservable.from_spectrum(pairs, self._tol)

    def to_json(self) -> dict:
        return {'matrix': matrix_to_json(self.matrix),
                'spectrum': [round_sig(v) for v in self.values]}

    @classmethod
    def from_json(cls, data: dict, tol=None) -> 'HermitianObservable':
        return cls(matrix_from_json(data['matrix']), tol)

    def __repr__(self):
        return f"HermitianObservable(dim={self.dim}, spectrum={[round_sig(v, 6) for v in self.values]})"


def union_spectrum(x: HermitianObservable, y: HermitianObservable) -> List[float]:
    """Distinct spectral values of either observable, merged within the wider cluster width"""
    width = max(x.cluster_width, y.cluster_width)
    merged: List[float] = []
    for v in sorted(x.values + y.values):
        if not merged or v - merged[-1] > width:
            merged.append(v)
    return merged


def spectral_projector(x: HermitianObservable, s: RealSet) -> np.ndarray:
    """E^X(s): sum of eigenprojectors whose value lies in s"""
    width = x.cluster_width
    out = np.zeros((x.dim, x.dim), dtype=complex)
    for v, p in x.spectrum:
        if s.contains(v, width):
            out = out + p
    return out


def apply_function(x: HermitianObservable, f: RealFunction) -> HermitianObservable:
    """f(X), with spectral points merged where f takes equal values"""
    if f.is_identity:
        return x
    return HermitianObservable.from_spectrum([(float(f(v)), p) for v, p in x.spectrum], x._tol)


def projection_meet(p, q, tol: Optional[ToleranceProfile] = None) -> np.ndarray:
    """Projector onto ran(P) intersected with ran(Q)"""
    p = as_matrix(p, square=True)
    q = as_matrix(q, square=True)
    ident = np.eye(p.shape[0])
    return largest_common_kernel([ident - p, ident - q], tol).projector()


def expectation(x: HermitianObservable, state: QuantumState) -> float:
    return float(state.expectation(x.matrix).real)


def moment(x: HermitianObservable, state: QuantumState, n: int) -> float:
    """Tr[X^n rho]"""
    return float(state.expectation(x.function_matrix(lambda t: t ** n)).real)


# ---------------------------------------------------------------------------
# POVMs and effect families
# ---------------------------------------------------------------------------

class EffectFamily:
    """Labeled positive operators; ``normalized`` records whether they sum to I"""

    def __init__(self, outcomes: Iterable[Tuple[float, np.ndarray]], normalized: bool):
        self.outcomes = [(float(label), np.asarray(effect, dtype=complex)) for label, effect in outcomes]
        if not self.outcomes:
            raise InvalidPovm("An effect family needs at least one outcome")
        self.dim = self.outcomes[0][1].shape[0]
        self.normalized = normalized

    @property
    def labels(self) -> List[float]:
        return [label for label, _ in self.outcomes]

    @property
    def effects(self) -> List[np.ndarray]:
        return [effect for _, effect in self.outcomes]

    def effect_at(self, label: float, width: Optional[float] = None) -> np.ndarray:
        width = default_tolerances().tol_cluster if width is None else width
        for l, e in self.outcomes:
            if abs(l - label) <= width:
                return e
        return np.zeros((self.dim, self.dim), dtype=complex)

    def effect_of(self, s: RealSet) -> np.ndarray:
        """Pi(s) as the sum of effects with labels in s"""
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for label, effect in self.outcomes:
            if s.contains(label):
                out = out + effect
        return out

    def probabilities(self, state: QuantumState) -> List[float]:
        return [float(state.expectation(e).real) for e in self.effects]

    def total(self) -> np.ndarray:
        return sum(self.effects)

    def to_json(self) -> dict:
        return {'normalized': self.normalized,
                'outcomes': [{'label': round_sig(l), 'effect': matrix_to_json(e)} for l, e in self.outcomes]}


class Povm(EffectFamily):
    """Labeled effects with distinct labels summing to the identity"""

    def __init__(self, outcomes: Iterable[Tuple[float, np.ndarray]],
                 tol: Optional[ToleranceProfile] = None, validate: bool = True):
        super().__init__(outcomes, normalized=True)
        self._tol = resolve_tol(tol)
        if validate:
            self._validate()

    def _validate(self):
        tol = self._tol
        labels = sorted(self.labels)
        if any(b - a <= tol.tol_cluster for a, b in zip(labels, labels[1:])):
            raise LabelMismatch(f"POVM labels must be distinct: {labels}")
        for label, effect in self.outcomes:
            if effect.shape != (self.dim, self.dim):
                raise DimensionMismatch(f"Effect for label {label} has shape {effect.shape}")
            if not is_hermitian(effect, tol):
                raise InvalidPovm(f"Effect for label {label} is not Hermitian")
            values, _ = eig_hermitian(effect, tol)
            if values[0] < -tol.tol_input or values[-1] > 1 + tol.tol_input:
                raise InvalidPovm(f"Effect for label {label} has eigenvalues outside [0, 1]")
        residual = max_abs(self.total() - np.eye(self.dim))
        if residual > tol.tol_input * max(1, self.dim):
            raise InvalidPovm(f"Effects do not sum to the identity (residual {residual:.3e})")

    @classmethod
    def projective(cls, x: HermitianObservable) -> 'Povm':
        return cls(x.spectrum, x._tol, validate=False)

    def effect_at(self, label: float, width: Optional[float] = None) -> np.ndarray:
        return super().effect_at(label, self._tol.tol_cluster if width is None else width)

    def moment(self, f: RealFunction) -> np.ndarray:
        return povm_moment(self, f)

    @classmethod
    def from_json(cls, data: dict, tol=None) -> 'Povm':
        return cls([(o['label'], matrix_from_json(o['effect'])) for o in data['outcomes']], tol)

    def __repr__(self):
        return f"Povm(dim={self.dim}, labels={[round_sig(l, 6) for l in self.labels]})"


def povm_transform_f(p: Povm, f: RealFunction) -> Povm:
    """Pi^f: relabel by f and sum effects whose new labels coincide"""
    if f.is_identity:
        return p
    width = p._tol.tol_cluster
    pairs = merge_spectrum([(float(f(label)), effect) for label, effect in p.outcomes], width)
    return Povm(pairs, p._tol, validate=False)


def povm_conjugate(p: EffectFamily, a, tol: Optional[ToleranceProfile] = None) -> EffectFamily:
    """
    Pi^A with effects A^dagger Pi_i A.

    Returns a Povm when A is an isometry, otherwise an EffectFamily flagged
    as not normalized.
    """
    tol = resolve_tol(tol)
    a = as_matrix(a)
    if a.shape[0] != p.dim:
        raise DimensionMismatch(f"Operator with {a.shape[0]} rows cannot conjugate effects of dimension {p.dim}")
    outcomes = [(label, hermitian_part(dagger(a) @ effect @ a)) for label, effect in p.outcomes]
    if p.normalized and is_isometry(a, tol):
        return Povm(outcomes, tol, validate=False)
    logger.debug("Conjugation by a non-isometry yields an unnormalized family")
    return EffectFamily(outcomes, normalized=False)


def povm_moment(p: EffectFamily, f: RealFunction) -> np.ndarray:
    """Pi(f) = sum f(label_i) effect_i"""
    return sum(float(f(label)) * effect for label, effect in p.outcomes)


def as_povm(obj: Union[Povm, HermitianObservable]) -> Povm:
    return Povm.projective(obj) if isinstance(obj, HermitianObservable) else obj


def union_labels(p1: EffectFamily, p2: EffectFamily, width: Optional[float] = None) -> List[float]:
    width = default_tolerances().tol_cluster if width is None else width
    merged: List[float] = []
    for v in sorted(p1.labels + p2.labels):
        if not merged or v - merged[-1] > width:
            merged.append(v)
    return merged
