"""
Measuring processes (K, xi, U, M), their instruments and the questions of
precise, repeatable and nondemolition measurement.

The system leg comes first: U acts on H (x) K with the probe second.
"""
import logging
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .correlation import cyclic_projector, is_perfectly_correlated
from .errors import DegenerateSpectrum, DimensionMismatch, InvalidMatrix, InvalidState, LabelMismatch
from .joint_dist import _born, _inverse_cdf
from .linalg_core import (
    RngLike,
    ToleranceProfile,
    as_matrix,
    as_vector,
    dagger,
    is_unitary,
    make_rng,
    matrix_from_json,
    matrix_to_json,
    max_abs,
    partial_trace,
    random_state_vector,
    resolve_tol,
    round_sig,
    tensor,
    unitary_from_isometry,
    vector_from_json,
)
from .models import ConditionReport, CorrelationVerdict, OutcomeTally, PairTally, SampledRun
from .povm_dilation import embedding, observable_povm_pc
from .spectral import HermitianObservable, Povm
from .states import QuantumState

logger = logging.getLogger(__name__)

SUPERPOSITION_PROBES = 3


class MeasuringProcess:
    """Probe space C^m, probe state xi, interaction U on H (x) K and meter M on K"""

    def __init__(self, probe_state, interaction, meter: Union[HermitianObservable, np.ndarray],
                 tol: Optional[ToleranceProfile] = None):
        tol = resolve_tol(tol)
        xi = as_vector(probe_state)
        if abs(np.linalg.norm(xi) - 1.0) > tol.tol_prob:
            raise InvalidState(f"Probe state has norm {np.linalg.norm(xi):.12g}, expected 1")
        u = as_matrix(interaction, square=True)
        if not isinstance(meter, HermitianObservable):
            meter = HermitianObservable(meter, tol)
        m = xi.shape[0]
        if meter.dim != m:
            raise DimensionMismatch(f"Meter of dimension {meter.dim} does not act on a probe of dimension {m}")
        if u.shape[0] % m != 0:
            raise DimensionMismatch(f"Interaction of dimension {u.shape[0]} is not a multiple of probe dimension {m}")
        if not is_unitary(u, tol):
            raise InvalidMatrix("Measuring interaction is not unitary")

        self.probe_dim = m
        self.probe_state = xi
        self.interaction = u
        self.meter = meter
        self.system_dim = u.shape[0] // m
        self._tol = tol

    @property
    def labels(self) -> List[float]:
        return self.meter.values

    def meter_after(self) -> HermitianObservable:
        """U^dagger (I (x) M) U on H (x) K"""
        return self.meter.extend(self.system_dim, side='left').conjugate(self.interaction)

    def system_after(self, a: HermitianObservable) -> HermitianObservable:
        """U^dagger (A (x) I) U on H (x) K"""
        return a.extend(self.probe_dim, side='right').conjugate(self.interaction)

    def dilate_state(self, s: QuantumState) -> QuantumState:
        return s.tensor(QuantumState(vector=self.probe_state, tol=self._tol))

    def output_operator(self, label: float, rho) -> np.ndarray:
        """Tr_K[(I (x) E^M({label})) U (rho (x) |xi><xi|) U^dagger]"""
        rho = as_matrix(rho, square=True)
        if rho.shape[0] != self.system_dim:
            raise DimensionMismatch(f"State of dimension {rho.shape[0]} fed to a process on dimension {self.system_dim}")
        joint = self.interaction @ tensor(rho, np.outer(self.probe_state, np.conj(self.probe_state))) @ dagger(self.interaction)
        gate = tensor(np.eye(self.system_dim), self.meter.projector_at(label))
        return partial_trace(gate @ joint, [self.system_dim, self.probe_dim], side='second')

    def to_json(self) -> dict:
        return {
            'probe_dim': self.probe_dim,
            'probe_state': matrix_to_json(self.probe_state),
            'interaction': matrix_to_json(self.interaction),
            'meter': matrix_to_json(self.meter.matrix),
        }

    @classmethod
    def from_json(cls, data: dict, tol=None) -> 'MeasuringProcess':
        mp = cls(vector_from_json(data['probe_state']), matrix_from_json(data['interaction']),
                 matrix_from_json(data['meter']), tol)
        if int(data.get('probe_dim', mp.probe_dim)) != mp.probe_dim:
            raise DimensionMismatch(f"probe_dim {data['probe_dim']} does not match the probe state")
        return mp

    def __repr__(self):
        return f"MeasuringProcess(system_dim={self.system_dim}, probe_dim={self.probe_dim})"


class Instrument:
    """Finitely many outcomes, each a completely positive map in Kraus form"""

    def __init__(self, outcomes: Iterable[Tuple[float, Sequence]], tol: Optional[ToleranceProfile] = None,
                 validate: bool = True):
        tol = resolve_tol(tol)
        self.outcomes = [(float(label), [as_matrix(k) for k in kraus]) for label, kraus in outcomes]
        if not self.outcomes or any(not kraus for _, kraus in self.outcomes):
            raise InvalidMatrix("An instrument needs at least one outcome with at least one Kraus operator")
        self.dim = self.outcomes[0][1][0].shape[1]
        self._tol = tol
        if validate:
            self._validate()

    def _validate(self):
        tol = self._tol
        labels = sorted(self.labels)
        if any(b - a <= tol.tol_cluster for a, b in zip(labels, labels[1:])):
            raise LabelMismatch(f"Instrument labels must be distinct: {labels}")
        for label, kraus in self.outcomes:
            for k in kraus:
                if k.shape != (self.dim, self.dim):
                    raise DimensionMismatch(f"Kraus operator for label {label} has shape {k.shape}")
        residual = max_abs(sum(dagger(k) @ k for _, kraus in self.outcomes for k in kraus) - np.eye(self.dim))
        if residual > tol.tol_prob * max(1, self.dim):
            raise InvalidMatrix(f"Instrument is not trace preserving (residual {residual:.3e})")

    @property
    def labels(self) -> List[float]:
        return [label for label, _ in self.outcomes]

    def kraus_at(self, label: float) -> List[np.ndarray]:
        for l, kraus in self.outcomes:
            if abs(l - label) <= self._tol.tol_cluster * max(1.0, abs(label)):
                return kraus
        return []

    def apply(self, label: float, rho) -> np.ndarray:
        """I({label}) rho = sum_i K_i rho K_i^dagger"""
        rho = np.asarray(rho, dtype=complex)
        return sum((k @ rho @ dagger(k) for k in self.kraus_at(label)),
                   np.zeros((self.dim, self.dim), dtype=complex))

    def to_json(self) -> dict:
        return {'outcomes': [{'label': round_sig(label), 'kraus': [matrix_to_json(k) for k in kraus]}
                             for label, kraus in self.outcomes]}

    @classmethod
    def from_json(cls, data: dict, tol=None) -> 'Instrument':
        return cls([(o['label'], [matrix_from_json(k) for k in o['kraus']]) for o in data['outcomes']], tol)

    def __repr__(self):
        return f"Instrument(dim={self.dim}, labels={[round_sig(l, 6) for l in self.labels]})"


class MeasurementOutcomeRecord:
    """Outcome probability and conditional output state; the state is None below tol_prob"""

    def __init__(self, label: float, probability: float, conditional_state: Optional[QuantumState]):
        self.label = label
        self.probability = probability
        self.conditional_state = conditional_state

    def to_json(self) -> dict:
        return {
            'label': round_sig(self.label),
            'probability': round_sig(self.probability),
            'conditional_state': None if self.conditional_state is None else self.conditional_state.to_json(),
        }


# ---------------------------------------------------------------------------
# Instruments and statistics
# ---------------------------------------------------------------------------

def instrument_of(mp: MeasuringProcess, tol: Optional[ToleranceProfile] = None) -> Instrument:
    """K_{a,i} = (I (x) <e_i|)(I (x) E^M({a})) U (I (x) |xi>) over the probe basis, zero operators dropped"""
    tol = resolve_tol(tol)
    d, m = mp.system_dim, mp.probe_dim
    slice_ = mp.interaction @ embedding(d, mp.probe_state)
    outcomes = []
    for label, projector in mp.meter.spectrum:
        gated = (tensor(np.eye(d), projector) @ slice_).reshape(d, m, d)
        kraus = [gated[:, i, :] for i in range(m) if max_abs(gated[:, i, :]) > tol.tol_zero]
        outcomes.append((label, kraus or [np.zeros((d, d), dtype=complex)]))
    return Instrument(outcomes, tol)


def povm_of(i: Instrument, tol: Optional[ToleranceProfile] = None) -> Povm:
    """Pi({a}) = sum_i K_{a,i}^dagger K_{a,i}"""
    return Povm([(label, sum(dagger(k) @ k for k in kraus)) for label, kraus in i.outcomes], tol or i._tol)


def apply_instrument(i: Instrument, label: float, s: Union[QuantumState, np.ndarray]) -> np.ndarray:
    """Unnormalized output I({label}) rho"""
    rho = s.density if isinstance(s, QuantumState) else as_matrix(s, square=True)
    if rho.shape[0] != i.dim:
        raise DimensionMismatch(f"State of dimension {rho.shape[0]} fed to an instrument on dimension {i.dim}")
    return i.apply(label, rho)


def measure(mp: MeasuringProcess, s: QuantumState,
            tol: Optional[ToleranceProfile] = None) -> List[MeasurementOutcomeRecord]:
    tol = resolve_tol(tol)
    if s.dim != mp.system_dim:
        raise DimensionMismatch(f"State of dimension {s.dim} fed to a process on dimension {mp.system_dim}")
    records = []
    for label in mp.labels:
        out = mp.output_operator(label, s.density)
        p = float(np.trace(out).real)
        state = QuantumState(density=out / p, tol=tol) if p > tol.tol_prob else None
        records.append(MeasurementOutcomeRecord(label, min(max(p, 0.0), 1.0), state))
    total = sum(r.probability for r in records)
    if abs(total - 1.0) > tol.tol_prob * 10:
        logger.warning("Outcome probabilities sum to %.12g", total)
    return records


def _symmetric_matrix_units(d: int) -> List[np.ndarray]:
    units = []
    for j in range(d):
        for k in range(j, d):
            e = np.zeros((d, d), dtype=complex)
            if j == k:
                e[j, j] = 1.0
                units.append(e)
                continue
            e[j, k] = e[k, j] = 1.0
            units.append(e)
            f = np.zeros((d, d), dtype=complex)
            f[j, k], f[k, j] = 1j, -1j
            units.append(f)
    return units


def _as_instrument(obj: Union[MeasuringProcess, Instrument], tol) -> Instrument:
    return instrument_of(obj, tol) if isinstance(obj, MeasuringProcess) else obj


def instrument_distance(first: Union[MeasuringProcess, Instrument], second: Union[MeasuringProcess, Instrument],
                        tol: Optional[ToleranceProfile] = None) -> float:
    """Largest entry of I1({a})E - I2({a})E over labels and the d^2 Hermitian matrix units"""
    tol = resolve_tol(tol)
    i1, i2 = _as_instrument(first, tol), _as_instrument(second, tol)
    if i1.dim != i2.dim:
        raise DimensionMismatch(f"Instruments act on dimensions {i1.dim} and {i2.dim}")
    l1, l2 = sorted(i1.labels), sorted(i2.labels)
    if len(l1) != len(l2) or any(abs(a - b) > tol.tol_cluster * max(1.0, abs(a)) for a, b in zip(l1, l2)):
        raise LabelMismatch(f"Outcome labels differ: {l1} vs {l2}")
    return max(max_abs(i1.apply(a, e) - i2.apply(a, e)) for a in l1 for e in _symmetric_matrix_units(i1.dim))


def statistically_equivalent(first: Union[MeasuringProcess, Instrument], second: Union[MeasuringProcess, Instrument],
                             tol: Optional[ToleranceProfile] = None) -> bool:
    tol = resolve_tol(tol)
    return instrument_distance(first, second, tol) <= tol.tol_zero * 10


# ---------------------------------------------------------------------------
# Precise measurement
# ---------------------------------------------------------------------------

def _check_observable(mp: MeasuringProcess, a: HermitianObservable, s: QuantumState):
    if a.dim != mp.system_dim or s.dim != mp.system_dim:
        raise DimensionMismatch(
            f"Observable ({a.dim}) and state ({s.dim}) must match the process dimension {mp.system_dim}")


def precisely_measures(mp: MeasuringProcess, a: HermitianObservable, s: QuantumState,
                       tol: Optional[ToleranceProfile] = None) -> ConditionReport:
    """
    Does mp precisely measure A in s?

    a  A (x) I and U^dagger (I (x) M) U perfectly correlated in rho (x) |xi><xi|
    b  the POVM of mp perfectly correlated with A in rho
    c  Born statistics of A reproduced in every state supported in C(A, rho)
    d  Pi({x}) P = E^A({x}) P on the cyclic subspace C(A, rho)
    e  Pi({x}) sigma = E^A({x}) sigma for sigma the uniform state on C(A, rho)

    ``details['bsf_on_state']`` records Born statistics on rho alone, which
    is necessary but not sufficient.
    """
    tol = resolve_tol(tol)
    _check_observable(mp, a, s)
    bound = tol.tol_zero * 10

    dilated = is_perfectly_correlated(a.extend(mp.probe_dim, 'right'), mp.meter_after(), mp.dilate_state(s), tol)
    povm = povm_of(instrument_of(mp, tol), tol)
    povm_verdict = observable_povm_pc(a, povm, s, tol)

    cyc = cyclic_projector(a, s, tol)
    labels = sorted(set(a.values) | set(povm.labels))
    width = a.cluster_width
    gaps = [(povm.effect_at(x, width) - a.projector_at(x, width)) for x in labels]
    bsf_state = max(abs(s.expectation(g)) for g in gaps)
    compressed = max(max_abs(cyc @ g @ cyc) for g in gaps)
    on_cyclic = max(max_abs(g @ cyc) for g in gaps)
    rank = max(float(np.trace(cyc).real), 1.0)
    uniform = max(max_abs(g @ cyc / rank) for g in gaps)

    conditions = {
        'a': dilated.correlated,
        'b': povm_verdict.correlated,
        'c': compressed <= bound,
        'd': on_cyclic <= bound,
        'e': uniform <= bound,
    }
    residuals = {
        'a': dilated.residuals['definition'],
        'b': povm_verdict.residuals['i'],
        'c': compressed,
        'd': on_cyclic,
        'e': uniform,
    }
    details = {'bsf_on_state': bsf_state <= bound, 'bsf_on_state_residual': bsf_state}
    if not (dilated.correlated or dilated.witness is None):
        details['witness'] = dilated.witness.to_json()
    return ConditionReport(holds=dilated.correlated, conditions=conditions, residuals=residuals, details=details)


# ---------------------------------------------------------------------------
# The repeatable model
# ---------------------------------------------------------------------------

def _rank_one_vector(p: np.ndarray) -> np.ndarray:
    """Unit vector spanning a rank-one projector, largest entry made real positive"""
    j = int(np.argmax(np.real(np.diag(p))))
    return p[:, j] / np.sqrt(p[j, j].real)


def _eigenbasis(x: HermitianObservable) -> List[np.ndarray]:
    if not x.is_nondegenerate():
        raise DegenerateSpectrum(f"Observable spectrum {x.values} is degenerate")
    return [_rank_one_vector(p) for p in x.projectors]


def von_neumann_model(a: HermitianObservable, phases: Optional[Sequence[complex]] = None,
                      tol: Optional[ToleranceProfile] = None) -> MeasuringProcess:
    """
    Repeatable measuring process for a nondegenerate observable.

    K = C^d, xi = e_0, M = sum_n a_n |e_n><e_n| and U(phi_n (x) xi) = alpha_n phi_n (x) e_n,
    completed to a unitary on the rest of H (x) K.
    """
    tol = resolve_tol(tol)
    basis = _eigenbasis(a)
    d = a.dim
    phases = [1.0] * d if phases is None else [complex(z) for z in phases]
    if len(phases) != d:
        raise DimensionMismatch(f"Expected {d} phases, got {len(phases)}")
    if any(abs(abs(z) - 1.0) > tol.tol_ortho * 10 for z in phases):
        raise InvalidMatrix("Phases must be unit complex numbers")

    probe = np.eye(d, dtype=complex)
    v = sum(phases[n] * np.outer(tensor(basis[n], probe[n]), np.conj(basis[n])) for n in range(d))
    u = unitary_from_isometry(v, d, tol)
    meter = HermitianObservable.from_spectrum([(a.values[n], np.outer(probe[n], probe[n])) for n in range(d)], tol)
    logger.debug("Built a repeatable model on dimension %d", d)
    return MeasuringProcess(probe[0], u, meter, tol)


def _probe_vectors(a: HermitianObservable, seed: RngLike, count: int = SUPERPOSITION_PROBES) -> List[np.ndarray]:
    """Eigenbasis of A, the uniform superposition and seeded random vectors"""
    rng = make_rng(seed)
    basis = _eigenbasis(a)
    vectors = list(basis)
    vectors.append(sum(basis) / np.sqrt(len(basis)))
    vectors.extend(random_state_vector(a.dim, rng) for _ in range(count))
    return vectors


def model_characterization(mp: MeasuringProcess, a: HermitianObservable,
                           m_basis_labels: Optional[Sequence[float]] = None, seed: RngLike = 0,
                           tol: Optional[ToleranceProfile] = None) -> ConditionReport:
    """
    Does U(phi_n (x) xi) = alpha_n phi_n (x) xi_n hold for unit alpha_n?

    ``m_basis_labels[n]`` is the meter value that records the n-th eigenvalue
    of A (ascending order); it defaults to A's own values. The meter is
    relabeled to B = sum_n a_n E^M({b_n}) before the correlations are tested.

    i   A (x) I and U^dagger (I (x) B) U perfectly correlated in every psi (x) xi
    ii  U^dagger (A (x) I) U and U^dagger (I (x) B) U perfectly correlated in every psi (x) xi
    slice  the slice equation itself, with the extracted phases in details

    A label that is not a meter value fails every condition involving B.
    """
    tol = resolve_tol(tol)
    if a.dim != mp.system_dim:
        raise DimensionMismatch(f"Observable of dimension {a.dim} tested against a process on dimension {mp.system_dim}")
    basis = _eigenbasis(a)
    _eigenbasis(mp.meter)
    labels = list(a.values) if m_basis_labels is None else [float(b) for b in m_basis_labels]
    if len(labels) != a.dim:
        raise LabelMismatch(f"Expected {a.dim} meter labels, got {len(labels)}")
    if len(set(labels)) != len(labels):
        raise LabelMismatch(f"Meter labels must be distinct: {labels}")
    targets = [mp.meter.projector_at(b) for b in labels]
    matched = all(max_abs(t) > 0.0 for t in targets)

    before = a.extend(mp.probe_dim, 'right')
    after = mp.system_after(a)
    pairs = {'nondemolition': (before, after)}
    if matched:
        relabeled = HermitianObservable.from_spectrum(zip(a.values, targets), tol)
        meter = relabeled.extend(mp.system_dim, side='left').conjugate(mp.interaction)
        pairs.update({'i': (before, meter), 'ii': (after, meter)})
    else:
        logger.debug("Meter labels %s are not all meter values", labels)
    holds = {k: k in pairs for k in ('i', 'ii', 'nondemolition')}
    worst = {k: 0.0 if k in pairs else 1.0 for k in holds}
    for psi in _probe_vectors(a, seed):
        dilated = mp.dilate_state(QuantumState(vector=psi, tol=tol))
        for key, (left, right) in pairs.items():
            verdict = is_perfectly_correlated(left, right, dilated, tol)
            holds[key] = holds[key] and verdict.correlated
            worst[key] = max(worst[key], verdict.residuals['definition'])

    phases, slice_residual = [], 0.0
    for n, target in enumerate(targets):
        if max_abs(target) == 0.0:
            slice_residual = max(slice_residual, 1.0)
            phases.append(0j)
            continue
        expected = tensor(basis[n], _rank_one_vector(target))
        image = mp.interaction @ tensor(basis[n], mp.probe_state)
        alpha = complex(np.vdot(expected, image))
        phases.append(alpha)
        slice_residual = max(slice_residual, float(np.linalg.norm(image - alpha * expected)),
                             abs(abs(alpha) - 1.0))
    slice_ok = slice_residual <= tol.tol_zero * 10

    conditions = {'i': holds['i'], 'ii': holds['ii'], 'slice': slice_ok}
    residuals = {'i': worst['i'], 'ii': worst['ii'], 'slice': slice_residual}
    details = {'nondemolition': holds['nondemolition'], 'labels': [round_sig(b) for b in labels]}
    if slice_ok:
        details['phases'] = [[round_sig(z.real), round_sig(z.imag)] for z in phases]
    return ConditionReport(holds=conditions['i'] and conditions['ii'], conditions=conditions,
                           residuals=residuals, details=details)



def realize_instrument(i: Instrument, tol: Optional[ToleranceProfile] = None) -> MeasuringProcess:
    """
    A measuring process whose instrument is ``i``.

    Each Kraus operator K_k gets a probe basis vector e_k; U extends
    psi (x) e_0 -> sum_k K_k psi (x) e_k and M = sum_a a sum_{k in a} |e_k><e_k|.
    """
    tol = resolve_tol(tol)
    flat = [(label, k) for label, kraus in i.outcomes for k in kraus]
    m = len(flat)
    probe = np.eye(m, dtype=complex)
    v = sum(tensor(k, probe[:, [n]]) for n, (_, k) in enumerate(flat))
    u = unitary_from_isometry(v, m, tol)
    pairs = []
    for label, _ in i.outcomes:
        idx = [n for n, (l, _) in enumerate(flat) if l == label]
        pairs.append((label, sum(np.outer(probe[n], probe[n]) for n in idx)))
    return MeasuringProcess(probe[0], u, HermitianObservable.from_spectrum(pairs, tol), tol)


# ---------------------------------------------------------------------------
# Nondemolition and the two-out-of-three relation
# ---------------------------------------------------------------------------

def nondemolition(mp: MeasuringProcess, a: HermitianObservable, s: QuantumState,
                  tol: Optional[ToleranceProfile] = None) -> CorrelationVerdict:
    """A (x) I and U^dagger (A (x) I) U perfectly correlated in rho (x) |xi><xi|"""
    tol = resolve_tol(tol)
    _check_observable(mp, a, s)
    return is_perfectly_correlated(a.extend(mp.probe_dim, 'right'), mp.system_after(a), mp.dilate_state(s), tol)


def two_of_three(mp: MeasuringProcess, a: HermitianObservable, s: QuantumState,
                 tol: Optional[ToleranceProfile] = None) -> ConditionReport:
    """
    Value reproduction, repeatability and nondemolition in rho (x) |xi><xi|.

    Any two of the three correlations imply the third by transitivity;
    ``holds`` is False only if some pair holds while the third fails.
    """
    tol = resolve_tol(tol)
    _check_observable(mp, a, s)
    dilated = mp.dilate_state(s)
    before = a.extend(mp.probe_dim, 'right')
    after = mp.system_after(a)
    meter = mp.meter_after()
    verdicts = {
        'value_reproducing': is_perfectly_correlated(before, meter, dilated, tol),
        'repeatability': is_perfectly_correlated(after, meter, dilated, tol),
        'nondemolition': is_perfectly_correlated(before, after, dilated, tol),
    }
    conditions = {k: v.correlated for k, v in verdicts.items()}
    names = list(conditions)
    implications = {}
    for k, third in enumerate(names):
        pair = [n for n in names if n != third]
        implications[f"{pair[0]}+{pair[1]}=>{third}"] = not (conditions[pair[0]] and conditions[pair[1]]) or conditions[third]
    return ConditionReport(holds=all(implications.values()), conditions=conditions,
                           residuals={k: v.residuals['definition'] for k, v in verdicts.items()},
                           details={'implications': implications})


# ---------------------------------------------------------------------------
# Sampling
# ---------------------------------------------------------------------------

def sample_measurements(mp: MeasuringProcess, s: QuantumState, n: int = 1000, seed: RngLike = None,
                        tol: Optional[ToleranceProfile] = None) -> SampledRun:
    """Draw n meter readings from the analytic output distribution"""
    tol = resolve_tol(tol)
    rng = make_rng(seed)
    records = measure(mp, s, tol)
    probs = _born([r.probability for r in records])
    counts = np.bincount(_inverse_cdf(probs, rng.random(n)), minlength=len(records))
    tallies = [OutcomeTally(label=r.label, count=int(c), frequency=c / n,
                            stderr=float(np.sqrt(r.probability * (1 - r.probability) / n)),
                            probability=r.probability)
               for r, c in zip(records, counts)]
    return SampledRun(n=n, seed=seed if isinstance(seed, int) else None, tallies=tallies)


def repeatability_trial(mp: MeasuringProcess, s: QuantumState, n: int = 1000, seed: RngLike = None,
                        tol: Optional[ToleranceProfile] = None) -> SampledRun:
    """
    Measure, feed the conditional output state back into the same process
    and measure again; ``all_equal`` reports whether every pair of readings agreed.
    """
    tol = resolve_tol(tol)
    rng = make_rng(seed)
    first = measure(mp, s, tol)
    first_probs = _born([r.probability for r in first])
    first_idx = _inverse_cdf(first_probs, rng.random(n))

    labels = mp.labels
    counts = np.zeros((len(labels), len(labels)), dtype=int)
    analytic = np.zeros((len(labels), len(labels)))
    for i, record in enumerate(first):
        if record.conditional_state is None:
            continue
        second = measure(mp, record.conditional_state, tol)
        analytic[i] = [record.probability * r.probability for r in second]
        mask = first_idx == i
        if mask.any():
            second_idx = _inverse_cdf(_born([r.probability for r in second]), rng.random(int(mask.sum())))
            np.add.at(counts, (np.full(second_idx.shape, i), second_idx), 1)

    tallies, all_equal = [], True
    for i, x in enumerate(labels):
        for j, y in enumerate(labels):
            c, p = int(counts[i, j]), float(analytic[i, j])
            if c == 0 and p <= tol.tol_prob:
                continue
            if c > 0 and i != j:
                all_equal = False
            tallies.append(PairTally(x=x, y=y, count=c, frequency=c / n,
                                     stderr=float(np.sqrt(p * (1 - p) / n)), probability=p))
    logger.debug("Repeatability trial of %d rounds, all equal: %s", n, all_equal)
    return SampledRun(n=n, seed=seed if isinstance(seed, int) else None, pair_tallies=tallies, all_equal=all_equal)
