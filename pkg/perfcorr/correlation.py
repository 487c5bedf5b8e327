"""
Perfect correlation between observables (and POVMs) in a state.

X and Y are perfectly correlated in rho when Tr[E^X(D) E^Y(G) rho] = 0 for
every pair of disjoint sets D, G. With finite spectra this reduces to the
pairs of distinct spectral points.
"""
import logging
from itertools import combinations
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import DimensionMismatch, InvalidState
from .linalg_core import (
    Subspace,
    ToleranceProfile,
    largest_common_kernel,
    make_rng,
    resolve_tol,
)
from .models import ConditionReport, CorrelationVerdict, Witness
from .spectral import (
    EffectFamily,
    HermitianObservable,
    Povm,
    RealFunction,
    apply_function,
    as_povm,
    probe_functions,
    union_labels,
    union_spectrum,
)
from .states import QuantumState

logger = logging.getLogger(__name__)

Labeled = Sequence[Tuple[float, np.ndarray]]

__all__ = [
    'QuantumState',
    'is_perfectly_correlated',
    'cross_mass',
    'check_equivalences_vector',
    'check_equivalences_mixed',
    'cyclic_subspace',
    'cyclic_projector',
    'perfectly_correlative_domain',
    'domain_projector',
    'domain_transitivity',
    'identically_distributed',
    'superposition_certificate',
    'proposition_conditions',
    'unitary_transport',
    'function_transport',
    'condition_taxonomy',
]


def _check_dims(*dims: int):
    if len(set(dims)) != 1:
        raise DimensionMismatch(f"Dimensions do not match: {list(dims)}")


def _cross_value(p: np.ndarray, q: np.ndarray, state: QuantumState) -> complex:
    """Tr[P Q rho]"""
    if state.is_vector:
        return complex(np.vdot(p @ state.vector, q @ state.vector))
    return complex(np.trace(p @ q @ state.density))


def cross_mass(left: Labeled, right: Labeled, state: QuantumState, width: float) -> Optional[Witness]:
    """Largest |Tr[P_a Q_b rho]| over label pairs with a != b, or None when there are no such pairs"""
    best: Optional[Witness] = None
    for a, p in left:
        for b, q in right:
            if abs(a - b) <= width:
                continue
            mag = abs(_cross_value(p, q, state))
            if best is None or mag > best.magnitude:
                best = Witness(lambda_=a, mu=b, magnitude=mag)
    return best


def _definition_verdict(left: Labeled, right: Labeled, state: QuantumState, width: float,
                        tol: ToleranceProfile) -> CorrelationVerdict:
    witness = cross_mass(left, right, state, width)
    magnitude = witness.magnitude if witness is not None else 0.0
    correlated = magnitude <= tol.tol_zero * state.dim
    return CorrelationVerdict(correlated=correlated,
                              witness=None if correlated else witness,
                              conditions={'definition': correlated},
                              residuals={'definition': magnitude})


def is_perfectly_correlated(x: HermitianObservable, y: HermitianObservable, s: QuantumState,
                            tol: Optional[ToleranceProfile] = None) -> CorrelationVerdict:
    """
    Decide perfect correlation of X and Y in s.

    Evaluates Tr[E^X({lambda}) E^Y({mu}) rho] over every pair of distinct
    spectral points; the witness on failure is the pair of largest magnitude.
    """
    tol = resolve_tol(tol)
    _check_dims(x.dim, y.dim, s.dim)
    width = max(x.cluster_width, y.cluster_width)
    return _definition_verdict(x.spectrum, y.spectrum, s, width, tol)


def _correlated(x, y, s, tol) -> bool:
    return is_perfectly_correlated(x, y, s, tol).correlated


# ---------------------------------------------------------------------------
# Cyclic subspaces and the perfectly correlative domain
# ---------------------------------------------------------------------------

def cyclic_subspace(x: HermitianObservable, s: QuantumState,
                    tol: Optional[ToleranceProfile] = None) -> Subspace:
    """C(X, rho): span of P_i phi_k over spectral projectors P_i and the eigenvectors phi_k of rho"""
    tol = resolve_tol(tol)
    _check_dims(x.dim, s.dim)
    vectors = [p @ phi for _, phi in s.eigen_components(tol) for p in x.projectors]
    return Subspace.span(vectors, x.dim, tol)


def cyclic_projector(x: HermitianObservable, s: QuantumState,
                     tol: Optional[ToleranceProfile] = None) -> np.ndarray:
    """P_{X,rho}"""
    return cyclic_subspace(x, s, tol).projector()


def _matched_projectors(x: HermitianObservable, y: HermitianObservable) -> List[Tuple[float, np.ndarray, np.ndarray]]:
    """(lambda, E^X({lambda}), E^Y({lambda})) over the union of both spectra"""
    width = max(x.cluster_width, y.cluster_width)
    return [(v, x.projector_at(v, width), y.projector_at(v, width)) for v in union_spectrum(x, y)]


def perfectly_correlative_domain(x: HermitianObservable, y: HermitianObservable,
                                 tol: Optional[ToleranceProfile] = None) -> Subspace:
    """{X=Y}: the intersection of ker(E^X({lambda}) - E^Y({lambda})) over all spectral points"""
    tol = resolve_tol(tol)
    _check_dims(x.dim, y.dim)
    matched = _matched_projectors(x, y)
    domain = largest_common_kernel([px - py for _, px, py in matched], tol)
    for _, px, py in matched:
        if not (domain.is_invariant_under(px, tol) and domain.is_invariant_under(py, tol)):
            logger.warning("Correlative domain of dimension %d is not invariant under a spectral projector",
                           domain.dim)
            break
    return domain


def domain_projector(x: HermitianObservable, y: HermitianObservable,
                     tol: Optional[ToleranceProfile] = None) -> np.ndarray:
    """[X=Y], the projector onto {X=Y}"""
    return perfectly_correlative_domain(x, y, tol).projector()


def domain_transitivity(x: HermitianObservable, y: HermitianObservable, z: HermitianObservable,
                        tol: Optional[ToleranceProfile] = None) -> bool:
    """True when {X=Y} and {Y=Z} together lie inside {X=Z}"""
    tol = resolve_tol(tol)
    meet = perfectly_correlative_domain(x, y, tol).intersect(perfectly_correlative_domain(y, z, tol), tol)
    return perfectly_correlative_domain(x, z, tol).contains(meet, tol)


# ---------------------------------------------------------------------------
# Equivalence reports
# ---------------------------------------------------------------------------

def _close(residual: float, scale: float, tol: ToleranceProfile) -> bool:
    return residual <= tol.tol_zero * 10 * max(1.0, scale)


def _function_pairs(x: HermitianObservable, y: HermitianObservable):
    for name, f in probe_functions(union_spectrum(x, y)):
        yield name, x.function_matrix(f), y.function_matrix(f)


def check_equivalences_vector(x: HermitianObservable, y: HermitianObservable, psi: QuantumState,
                              tol: Optional[ToleranceProfile] = None) -> CorrelationVerdict:
    """
    Evaluate each characterization of perfect correlation in a vector state.

    i    the definition
    ii   correlated in every unit vector of C(X, psi)
    iii  E^X({lambda}) psi = E^Y({lambda}) psi for every spectral point
    iv   f(X) psi = f(Y) psi over the probe functions
    v    f(X) P = f(Y) P with P = P_{X,psi}
    vi   P_{X,psi} = P_{Y,psi} and X P_{X,psi} = Y P_{Y,psi}
    """
    tol = resolve_tol(tol)
    if not psi.is_vector:
        raise InvalidState("check_equivalences_vector needs a vector state")
    _check_dims(x.dim, y.dim, psi.dim)
    scale = max(x.norm, y.norm, 1.0)
    verdict = is_perfectly_correlated(x, y, psi, tol)
    conditions = {'i': verdict.correlated}
    residuals = {'i': verdict.residuals['definition']}

    cyc_x = cyclic_subspace(x, psi, tol)
    uniform = QuantumState.uniform_on(cyc_x, tol)
    uniform_verdict = is_perfectly_correlated(x, y, uniform, tol)
    conditions['ii'] = uniform_verdict.correlated
    residuals['ii'] = uniform_verdict.residuals['definition']

    res = max(float(np.linalg.norm(psi.act(px) - psi.act(py))) for _, px, py in _matched_projectors(x, y))
    conditions['iii'] = _close(res, 1.0, tol)
    residuals['iii'] = res

    res = max(float(np.linalg.norm(psi.act(fx) - psi.act(fy))) for _, fx, fy in _function_pairs(x, y))
    conditions['iv'] = _close(res, scale, tol)
    residuals['iv'] = res

    p_x = cyc_x.projector()
    res = max(float(np.linalg.norm(fx @ p_x - fy @ p_x, 2)) for _, fx, fy in _function_pairs(x, y))
    conditions['v'] = _close(res, scale, tol)
    residuals['v'] = res

    p_y = cyclic_projector(y, psi, tol)
    res = max(float(np.linalg.norm(p_x - p_y, 2)),
              float(np.linalg.norm(x.matrix @ p_x - y.matrix @ p_y, 2)))
    conditions['vi'] = _close(res, scale, tol)
    residuals['vi'] = res

    return CorrelationVerdict(correlated=verdict.correlated, witness=verdict.witness,
                              conditions=conditions, residuals=residuals)


def check_equivalences_mixed(x: HermitianObservable, y: HermitianObservable, rho: QuantumState,
                             tol: Optional[ToleranceProfile] = None) -> CorrelationVerdict:
    """
    Evaluate each characterization of perfect correlation in a (mixed) state.

    i     the definition
    ii    correlated in every eigenvector of rho with nonzero weight
    iii   correlated in the uniform state on C(X, rho)
    iv    correlated in each basis vector of C(X, rho)
    v     E^X({lambda}) rho = E^Y({lambda}) rho
    vi    f(X) P_{X,rho} = f(Y) P_{X,rho} over the probe functions
    vii   P_{X,rho} = P_{Y,rho} and X P_{X,rho} = Y P_{Y,rho}
    domain_left / domain_right   [X=Y] rho = rho and rho [X=Y] = rho
    """
    tol = resolve_tol(tol)
    _check_dims(x.dim, y.dim, rho.dim)
    scale = max(x.norm, y.norm, 1.0)
    verdict = is_perfectly_correlated(x, y, rho, tol)
    conditions = {'i': verdict.correlated}
    residuals = {'i': verdict.residuals['definition']}

    worst = 0.0
    for _, phi in rho.eigen_components(tol):
        worst = max(worst, is_perfectly_correlated(x, y, QuantumState(vector=phi, tol=tol), tol).residuals['definition'])
    conditions['ii'] = worst <= tol.tol_zero * rho.dim
    residuals['ii'] = worst

    cyc_x = cyclic_subspace(x, rho, tol)
    uniform_res = is_perfectly_correlated(x, y, QuantumState.uniform_on(cyc_x, tol), tol).residuals['definition']
    conditions['iii'] = uniform_res <= tol.tol_zero * rho.dim
    residuals['iii'] = uniform_res

    worst = 0.0
    for k in range(cyc_x.dim):
        state = QuantumState(vector=cyc_x.basis[:, k], tol=tol)
        worst = max(worst, is_perfectly_correlated(x, y, state, tol).residuals['definition'])
    conditions['iv'] = worst <= tol.tol_zero * rho.dim
    residuals['iv'] = worst

    res = max(float(np.linalg.norm(px @ rho.density - py @ rho.density, 2))
              for _, px, py in _matched_projectors(x, y))
    conditions['v'] = _close(res, 1.0, tol)
    residuals['v'] = res

    p_x = cyc_x.projector()
    res = max(float(np.linalg.norm(fx @ p_x - fy @ p_x, 2)) for _, fx, fy in _function_pairs(x, y))
    conditions['vi'] = _close(res, scale, tol)
    residuals['vi'] = res

    p_y = cyclic_projector(y, rho, tol)
    res = max(float(np.linalg.norm(p_x - p_y, 2)),
              float(np.linalg.norm(x.matrix @ p_x - y.matrix @ p_y, 2)))
    conditions['vii'] = _close(res, scale, tol)
    residuals['vii'] = res

    dom = domain_projector(x, y, tol)
    res = float(np.linalg.norm(dom @ rho.density - rho.density, 2))
    conditions['domain_left'] = _close(res, 1.0, tol)
    residuals['domain_left'] = res
    res = float(np.linalg.norm(rho.density @ dom - rho.density, 2))
    conditions['domain_right'] = _close(res, 1.0, tol)
    residuals['domain_right'] = res

    return CorrelationVerdict(correlated=verdict.correlated, witness=verdict.witness,
                              conditions=conditions, residuals=residuals)


# ---------------------------------------------------------------------------
# Distributions and certificates
# ---------------------------------------------------------------------------

def identically_distributed(x: HermitianObservable, y: HermitianObservable, s: QuantumState,
                            tol: Optional[ToleranceProfile] = None) -> bool:
    """Tr[E^X({lambda}) rho] = Tr[E^Y({lambda}) rho] at every spectral point of either observable"""
    tol = resolve_tol(tol)
    _check_dims(x.dim, y.dim, s.dim)
    return all(abs(s.expectation(px).real - s.expectation(py).real) <= tol.tol_prob
               for _, px, py in _matched_projectors(x, y))


def superposition_certificate(x: HermitianObservable, y: HermitianObservable, psi: QuantumState,
                              tol: Optional[ToleranceProfile] = None) -> Optional[List[Tuple[float, np.ndarray]]]:
    """
    Split psi into common eigenvectors of X and Y.

    Returns (lambda, E^X({lambda}) psi) for every nonzero component, each
    certified to satisfy X c = lambda c and Y c = lambda c, or None when the
    pair is not perfectly correlated in psi.
    """
    tol = resolve_tol(tol)
    if not psi.is_vector:
        raise InvalidState("superposition_certificate needs a vector state")
    if not _correlated(x, y, psi, tol):
        return None
    scale = max(x.norm, y.norm, 1.0)
    components = []
    for value, p in x.spectrum:
        comp = p @ psi.vector
        if np.linalg.norm(comp) <= tol.tol_zero:
            continue
        res = max(float(np.linalg.norm(x.matrix @ comp - value * comp)),
                  float(np.linalg.norm(y.matrix @ comp - value * comp)))
        if not _close(res, scale, tol):
            logger.warning("Component at %.6g failed the common eigenvector check (residual %.3e)", value, res)
            return None
        components.append((value, comp))
    return components


def _label_subsets(labels: Sequence[float]) -> List[Tuple[float, ...]]:
    singles = [(l,) for l in labels]
    pairs = list(combinations(labels, 2))
    return singles + pairs


def proposition_conditions(p1: Union[Povm, HermitianObservable], p2: Union[Povm, HermitianObservable],
                           s: QuantumState, tol: Optional[ToleranceProfile] = None) -> CorrelationVerdict:
    """
    Trace characterizations of perfect correlation for two POVMs.

    i    Tr[Pi1({a}) Pi2({b}) rho] = 0 for a != b
    ii   Tr[Pi1(D) Pi2(G) rho] = Tr[Pi1(D & G) rho]
    iii  Tr[Pi1(D) Pi2(G) rho] = Tr[Pi2(D & G) rho]

    D and G range over singletons and pairs of labels.
    """
    tol = resolve_tol(tol)
    p1, p2 = as_povm(p1), as_povm(p2)
    _check_dims(p1.dim, p2.dim, s.dim)
    width = tol.tol_cluster
    labels = union_labels(p1, p2, width)
    verdict = _definition_verdict(p1.outcomes, p2.outcomes, s, width, tol)

    def effect(p: EffectFamily, subset: Iterable[float]) -> np.ndarray:
        return sum((p.effect_at(l, width) for l in subset), np.zeros((p.dim, p.dim), dtype=complex))

    res_ii = res_iii = 0.0
    subsets = _label_subsets(labels)
    for d in subsets:
        e1 = effect(p1, d)
        for g in subsets:
            lhs = _cross_value(e1, effect(p2, g), s)
            both = [l for l in d if any(abs(l - m) <= width for m in g)]
            res_ii = max(res_ii, abs(lhs - s.expectation(effect(p1, both))))
            res_iii = max(res_iii, abs(lhs - s.expectation(effect(p2, both))))

    bound = tol.tol_zero * s.dim * 4
    conditions = {'i': verdict.correlated, 'ii': res_ii <= bound, 'iii': res_iii <= bound}
    residuals = {'i': verdict.residuals['definition'], 'ii': res_ii, 'iii': res_iii}
    return CorrelationVerdict(correlated=verdict.correlated, witness=verdict.witness,
                              conditions=conditions, residuals=residuals)


# ---------------------------------------------------------------------------
# Transport
# ---------------------------------------------------------------------------

def unitary_transport(x: HermitianObservable, y: HermitianObservable, s: QuantumState, u,
                      tol: Optional[ToleranceProfile] = None) -> Tuple[bool, bool]:
    """(correlated in rho, U^dagger X U and U^dagger Y U correlated in U^dagger rho U)"""
    tol = resolve_tol(tol)
    before = _correlated(x, y, s, tol)
    after = _correlated(x.conjugate(u), y.conjugate(u), s.conjugate(u), tol)
    return before, after


def function_transport(x: HermitianObservable, y: HermitianObservable, s: QuantumState, f: RealFunction,
                       tol: Optional[ToleranceProfile] = None) -> Tuple[bool, bool]:
    """(X, Y correlated in rho, f(X), f(Y) correlated in rho)"""
    tol = resolve_tol(tol)
    return _correlated(x, y, s, tol), _correlated(apply_function(x, f), apply_function(y, f), s, tol)


def random_cyclic_vectors(x: HermitianObservable, s: QuantumState, count: int, rng=None,
                          tol: Optional[ToleranceProfile] = None) -> List[np.ndarray]:
    """Basis vectors of C(X, rho) followed by ``count`` random unit vectors inside it"""
    tol = resolve_tol(tol)
    rng = make_rng(rng)
    cyc = cyclic_subspace(x, s, tol)
    vectors = [cyc.basis[:, k] for k in range(cyc.dim)]
    for _ in range(count):
        coeffs = rng.normal(size=cyc.dim) + 1j * rng.normal(size=cyc.dim)
        v = cyc.basis @ coeffs
        vectors.append(v / np.linalg.norm(v))
    return vectors


# ---------------------------------------------------------------------------
# Condition taxonomy
# ---------------------------------------------------------------------------

def condition_taxonomy(x: HermitianObservable, y: HermitianObservable, s: QuantumState,
                       tol: Optional[ToleranceProfile] = None) -> ConditionReport:
    """
    Four candidate meanings of "X and Y have the same value" in a state.

    i           equi-valuedness: joint outcomes never differ
    ii          reproducibility: successive measurements agree in both orders
    iii         zero difference: (X - Y) rho = 0
    iv          identical distribution
    iii_cyclic  (X - Y) P_{X,rho} = 0
    iv_cyclic   identical distribution in every state supported in C(X, rho)

    i, ii, iii_cyclic and iv_cyclic are equivalent; iii and iv are only implied.
    """
    tol = resolve_tol(tol)
    _check_dims(x.dim, y.dim, s.dim)
    width = max(x.cluster_width, y.cluster_width)
    scale = max(x.norm, y.norm, 1.0)
    rho = s.density
    verdict = is_perfectly_correlated(x, y, s, tol)

    reproduce = 0.0
    for lam, p in x.spectrum:
        for mu, q in y.spectrum:
            if abs(lam - mu) <= width:
                continue
            reproduce += abs(np.trace(p @ q @ rho @ q @ p).real) + abs(np.trace(q @ p @ rho @ p @ q).real)

    diff = x.matrix - y.matrix
    zero_diff = float(np.linalg.norm(diff @ rho, 2))
    cyc = cyclic_projector(x, s, tol)
    zero_diff_cyc = float(np.linalg.norm(diff @ cyc, 2))
    matched = _matched_projectors(x, y)
    dist_gap = max(abs(s.expectation(px - py)) for _, px, py in matched)
    dist_gap_cyc = max(float(np.abs(cyc @ (px - py) @ cyc).max()) for _, px, py in matched)

    bound = tol.tol_zero * 10
    conditions = {
        'i': verdict.correlated,
        'ii': reproduce <= tol.tol_zero * s.dim,
        'iii': _close(zero_diff, scale, tol),
        'iv': dist_gap <= tol.tol_prob,
        'iii_cyclic': _close(zero_diff_cyc, scale, tol),
        'iv_cyclic': dist_gap_cyc <= bound,
    }
    residuals = {
        'i': verdict.residuals['definition'],
        'ii': reproduce,
        'iii': zero_diff,
        'iv': dist_gap,
        'iii_cyclic': zero_diff_cyc,
        'iv_cyclic': dist_gap_cyc,
    }
    details = {}
    if verdict.witness is not None:
        details['witness'] = verdict.witness.to_json()
    return ConditionReport(holds=verdict.correlated, conditions=conditions, residuals=residuals, details=details)
