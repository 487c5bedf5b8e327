"""
Naimark dilations of POVMs and perfect correlation involving POVMs.

Dilated operators act on H (x) K with the system leg first. A joint
dilation lives on H (x) K1 (x) K2.
"""
import logging
from typing import List, Optional, Tuple

import numpy as np

from .correlation import (
    _check_dims,
    cyclic_projector,
    cyclic_subspace,
    is_perfectly_correlated,
    proposition_conditions,
)
from .errors import DimensionMismatch
from .linalg_core import (
    ToleranceProfile,
    dagger,
    matrix_to_json,
    max_abs,
    permute_legs,
    psd_sqrt,
    resolve_tol,
    round_sig,
    tensor,
    unitary_from_isometry,
)
from .models import ConditionReport, CorrelationVerdict
from .spectral import (
    HermitianObservable,
    Povm,
    RealFunction,
    povm_moment,
    povm_transform_f,
    probe_functions,
    union_labels,
)
from .states import QuantumState

logger = logging.getLogger(__name__)


def embedding(dim: int, probe_state: np.ndarray) -> np.ndarray:
    """V_xi: psi -> psi (x) xi as a (dim * k) x dim matrix"""
    return tensor(np.eye(dim), np.asarray(probe_state).reshape(-1, 1))


class NaimarkDilation:
    """(K, xi, L) with <psi', Pi(a) psi> = <psi' (x) xi, E^L({a}) psi (x) xi>"""

    def __init__(self, povm: Povm, probe_state: np.ndarray, observable: HermitianObservable,
                 unitary: np.ndarray):
        self.povm = povm
        self.system_dim = povm.dim
        self.probe_dim = probe_state.shape[0]
        self.probe_state = probe_state
        self.observable = observable
        self.unitary = unitary
        self.isometry = embedding(self.system_dim, probe_state)

    def compressed(self, label: float) -> np.ndarray:
        """V_xi^dagger E^L({label}) V_xi"""
        return dagger(self.isometry) @ self.observable.projector_at(label) @ self.isometry

    def check(self) -> float:
        """Largest deviation of the compressed meter projectors from the effects"""
        return max(max_abs(self.compressed(label) - effect) for label, effect in self.povm.outcomes)

    def dilate_state(self, s: QuantumState) -> QuantumState:
        probe = QuantumState(vector=self.probe_state)
        return s.tensor(probe)

    def statistics(self, s: QuantumState) -> List[Tuple[float, float]]:
        """(label, Tr[E^L({label}) (rho (x) |xi><xi|)]) for every outcome"""
        dilated = self.dilate_state(s)
        return [(label, float(dilated.expectation(self.observable.projector_at(label)).real))
                for label in self.povm.labels]

    def to_json(self) -> dict:
        return {
            'probe_dim': self.probe_dim,
            'probe_state': matrix_to_json(self.probe_state),
            'labels': [round_sig(l) for l in self.povm.labels],
            'unitary': matrix_to_json(self.unitary),
            'dilated_observable': matrix_to_json(self.observable.matrix),
            'residual': round_sig(self.check()),
        }


def naimark_dilate(p: Povm, tol: Optional[ToleranceProfile] = None) -> NaimarkDilation:
    """
    Dilate a POVM with m outcomes onto H (x) C^m.

    V psi = sum_a (sqrt(Pi_a) psi) (x) e_a is completed to a unitary W with
    W (psi (x) e_0) = V psi; then xi = e_0 and E^L({a}) = W^dagger (I (x) |e_a><e_a|) W.
    """
    tol = resolve_tol(tol)
    d, m = p.dim, len(p.outcomes)
    basis = np.eye(m)
    v = sum(tensor(psd_sqrt(effect, tol), basis[:, [a]]) for a, effect in enumerate(p.effects))
    w = unitary_from_isometry(v, m, tol)

    pairs = [(label, dagger(w) @ tensor(np.eye(d), np.outer(basis[a], basis[a])) @ w)
             for a, label in enumerate(p.labels)]
    observable = HermitianObservable.from_spectrum(pairs, tol)
    dilation = NaimarkDilation(p, basis[0].astype(complex), observable, w)
    logger.debug("Naimark dilation of %d outcomes on dimension %d, residual %.3e", m, d, dilation.check())
    return dilation


class JointDilation:
    """(K1 (x) K2, xi1 (x) xi2, X, Y) for two POVMs, legs ordered H (x) K1 (x) K2"""

    def __init__(self, first: NaimarkDilation, second: NaimarkDilation,
                 x: HermitianObservable, y: HermitianObservable):
        self.first = first
        self.second = second
        self.x = x
        self.y = y
        self.system_dim = first.system_dim
        self.probe_state = tensor(first.probe_state, second.probe_state)
        self.probe_dim = first.probe_dim * second.probe_dim
        self.isometry = embedding(self.system_dim, self.probe_state)

    def check(self) -> float:
        """
        Largest deviation of Pi1(a) Pi2(b) from V_xi^dagger E^X({a}) E^Y({b}) V_xi;
        entrywise this is the identity <Pi1 psi', Pi2 psi> = <E^X psi' (x) xi, E^Y psi (x) xi>.
        """
        worst = 0.0
        for a, e1 in self.first.povm.outcomes:
            for b, e2 in self.second.povm.outcomes:
                dilated = dagger(self.isometry) @ self.x.projector_at(a) @ self.y.projector_at(b) @ self.isometry
                worst = max(worst, max_abs(e1 @ e2 - dilated))
        return worst

    def dilate_state(self, s: QuantumState) -> QuantumState:
        return s.tensor(QuantumState(vector=self.probe_state))

    def to_json(self) -> dict:
        return {
            'probe_dim': self.probe_dim,
            'probe_state': matrix_to_json(self.probe_state),
            'x': matrix_to_json(self.x.matrix),
            'y': matrix_to_json(self.y.matrix),
            'residual': round_sig(self.check()),
        }


def joint_dilate(p1: Povm, p2: Povm, tol: Optional[ToleranceProfile] = None) -> JointDilation:
    """X = L1 (x) I2 and Y = L2 (x) I1 with Y's legs reordered onto H (x) K1 (x) K2"""
    tol = resolve_tol(tol)
    if p1.dim != p2.dim:
        raise DimensionMismatch(f"POVMs act on dimensions {p1.dim} and {p2.dim}")
    n1, n2 = naimark_dilate(p1, tol), naimark_dilate(p2, tol)
    d, m1, m2 = p1.dim, n1.probe_dim, n2.probe_dim

    x = HermitianObservable.from_spectrum(
        [(v, tensor(p, np.eye(m2))) for v, p in n1.observable.spectrum], tol)
    y = HermitianObservable.from_spectrum(
        [(v, permute_legs(tensor(p, np.eye(m1)), [d, m2, m1], [0, 2, 1])) for v, p in n2.observable.spectrum], tol)
    return JointDilation(n1, n2, x, y)


# ---------------------------------------------------------------------------
# Perfect correlation with POVMs
# ---------------------------------------------------------------------------

def povm_perfectly_correlated(p1: Povm, p2: Povm, s: QuantumState,
                              tol: Optional[ToleranceProfile] = None) -> CorrelationVerdict:
    """Tr[Pi1({a}) Pi2({b}) rho] = 0 for distinct labels, with the trace identities cross-checked"""
    return proposition_conditions(p1, p2, s, tol)


def _probe_pairs(x: HermitianObservable, p: Povm):
    for name, f in probe_functions(union_labels(Povm.projective(x), p)):
        yield name, x.function_matrix(f), povm_moment(p, f)


def observable_povm_pc(x: HermitianObservable, p: Povm, s: QuantumState,
                       tol: Optional[ToleranceProfile] = None) -> CorrelationVerdict:
    """
    Characterizations of perfect correlation between an observable and a POVM.

    i    E^X and Pi perfectly correlated in rho
    ii   perfectly correlated in the uniform state on C(X, rho)
    iii  E^X({lambda}) rho = Pi({lambda}) rho for every label
    iv   f(X) rho = Pi(f) rho over the probe functions
    v    f(X) P_{X,rho} = Pi(f) P_{X,rho}
    """
    tol = resolve_tol(tol)
    _check_dims(x.dim, p.dim, s.dim)
    scale = max(x.norm, max(abs(l) for l in p.labels), 1.0)
    bound = tol.tol_zero * 10
    projective = Povm.projective(x)
    verdict = povm_perfectly_correlated(projective, p, s, tol)
    conditions = {'i': verdict.correlated}
    residuals = {'i': verdict.residuals['i']}

    uniform = QuantumState.uniform_on(cyclic_subspace(x, s, tol), tol)
    sub = povm_perfectly_correlated(projective, p, uniform, tol)
    conditions['ii'] = sub.correlated
    residuals['ii'] = sub.residuals['i']

    width = tol.tol_cluster
    rho = s.density
    res = max(float(np.linalg.norm((projective.effect_at(l, width) - p.effect_at(l, width)) @ rho, 2))
              for l in union_labels(projective, p, width))
    conditions['iii'] = res <= bound
    residuals['iii'] = res

    res = max(float(np.linalg.norm((fx - fp) @ rho, 2)) for _, fx, fp in _probe_pairs(x, p))
    conditions['iv'] = res <= bound * scale
    residuals['iv'] = res

    cyc = cyclic_projector(x, s, tol)
    res = max(float(np.linalg.norm((fx - fp) @ cyc, 2)) for _, fx, fp in _probe_pairs(x, p))
    conditions['v'] = res <= bound * scale
    residuals['v'] = res

    return CorrelationVerdict(correlated=verdict.correlated, witness=verdict.witness,
                              conditions=conditions, residuals=residuals)


def distance_povm_check(p1: Povm, p2: Povm, s: QuantumState,
                        tol: Optional[ToleranceProfile] = None) -> ConditionReport:
    """
    Compare POVM correlation with correlation of the joint dilation in rho (x) |xi><xi|,
    and when correlated check Pi1(f) rho = Pi2(f) rho over the probe functions.
    """
    tol = resolve_tol(tol)
    _check_dims(p1.dim, p2.dim, s.dim)
    direct = povm_perfectly_correlated(p1, p2, s, tol)
    joint = joint_dilate(p1, p2, tol)
    dilated = is_perfectly_correlated(joint.x, joint.y, joint.dilate_state(s), tol)

    res = 0.0
    for _, f in probe_functions(union_labels(p1, p2)):
        res = max(res, float(np.linalg.norm((povm_moment(p1, f) - povm_moment(p2, f)) @ s.density, 2)))
    scale = max(max(abs(l) for l in p1.labels + p2.labels), 1.0)

    conditions = {
        'correlated': direct.correlated,
        'dilation_correlated': dilated.correlated,
        'functions_agree': res <= tol.tol_zero * 10 * scale,
    }
    residuals = {
        'correlated': direct.residuals['i'],
        'dilation_correlated': dilated.residuals['definition'],
        'functions_agree': res,
        'dilation_identity': joint.check(),
    }
    return ConditionReport(holds=direct.correlated, conditions=conditions, residuals=residuals)


def transport_check(p1: Povm, p2: Povm, s: QuantumState, f: RealFunction,
                    tol: Optional[ToleranceProfile] = None) -> bool:
    """
    Consistency of correlation under relabeling: correlated POVMs stay
    correlated after applying f, and for f injective on the labels the
    converse holds too.
    """
    tol = resolve_tol(tol)
    before = povm_perfectly_correlated(p1, p2, s, tol).correlated
    after = povm_perfectly_correlated(povm_transform_f(p1, f), povm_transform_f(p2, f), s, tol).correlated
    if before and not after:
        return False
    if f.is_injective_on(p1.labels + p2.labels) and after and not before:
        return False
    return True
