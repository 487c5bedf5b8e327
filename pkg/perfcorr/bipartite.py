"""
Bipartite pure states: Schmidt decompositions, entanglement and Hardy's conditions.
"""
import logging
import math
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .correlation import is_perfectly_correlated
from .errors import DimensionMismatch, InvalidState, SpectrumNotBinary
from .linalg_core import (
    ToleranceProfile,
    as_vector,
    eig_hermitian,
    make_rng,
    matrix_to_json,
    partial_trace,
    resolve_tol,
    round_sig,
    tensor,
)
from .models import HardyReport, HardyVerdict
from .spectral import HermitianObservable
from .states import QuantumState

logger = logging.getLogger(__name__)

MAXIMAL_TOL = 1e-9
HARDY_ZERO = 1e-9
HARDY_POSITIVE = 1e-4


def _log(base) -> float:
    if str(base) == '2':
        return math.log(2.0)
    if str(base) in ('e', 'E'):
        return 1.0
    raise ValueError(f"Unsupported entropy base: {base}")


def _state_vector(psi) -> np.ndarray:
    if isinstance(psi, QuantumState):
        if not psi.is_vector:
            raise InvalidState("Expected a vector state")
        return psi.vector
    return as_vector(psi)


class SchmidtDecomposition:
    """psi = sum_j sqrt(p_j) phi_j (x) xi_j with descending weights"""

    def __init__(self, weights, left, right, dims: Tuple[int, int], values: Optional[Sequence[float]] = None):
        self.weights = np.asarray(weights, dtype=float)
        self.left = np.asarray(left, dtype=complex)
        self.right = np.asarray(right, dtype=complex)
        self.dims = (int(dims[0]), int(dims[1]))
        self.values = None if values is None else [float(v) for v in values]

    @property
    def rank(self) -> int:
        return len(self.weights)

    def reconstruct(self) -> np.ndarray:
        out = np.zeros(self.dims[0] * self.dims[1], dtype=complex)
        for j in range(self.rank):
            out = out + math.sqrt(self.weights[j]) * tensor(self.left[:, j], self.right[:, j])
        return out

    def entropy(self, base='e') -> float:
        w = self.weights[self.weights > 0]
        return float(-np.sum(w * np.log(w)) / _log(base))

    def to_json(self) -> dict:
        data = {
            'dims': list(self.dims),
            'weights': [round_sig(w) for w in self.weights],
            'left': matrix_to_json(self.left.T),
            'right': matrix_to_json(self.right.T),
        }
        if self.values is not None:
            data['values'] = [round_sig(v) for v in self.values]
        return data


def schmidt(psi, dims: Sequence[int], tol: Optional[ToleranceProfile] = None) -> SchmidtDecomposition:
    """Schmidt decomposition via the SVD of the d1 x d2 coefficient matrix"""
    tol = resolve_tol(tol)
    vec = _state_vector(psi)
    d1, d2 = int(dims[0]), int(dims[1])
    if vec.size != d1 * d2:
        raise DimensionMismatch(f"Vector of length {vec.size} does not factor as {d1} x {d2}")
    u, s, vh = np.linalg.svd(vec.reshape(d1, d2), full_matrices=False)
    weights = s ** 2
    keep = weights > tol.tol_zero ** 2
    return SchmidtDecomposition(weights[keep], u[:, keep], vh[keep, :].T, (d1, d2))


def reduced_states(psi, dims: Sequence[int]) -> Tuple[np.ndarray, np.ndarray]:
    """(rho_1, rho_2) = (Tr_2 |psi><psi|, Tr_1 |psi><psi|)"""
    vec = _state_vector(psi)
    rho = np.outer(vec, np.conj(vec))
    return partial_trace(rho, dims, 'second'), partial_trace(rho, dims, 'first')


def von_neumann_entropy(rho, base='e', tol: Optional[ToleranceProfile] = None) -> float:
    tol = resolve_tol(tol)
    values, _ = eig_hermitian(rho, tol)
    w = values[values > tol.tol_zero]
    return float(-np.sum(w * np.log(w)) / _log(base))


def entanglement(psi, dims: Sequence[int], base='e', tol: Optional[ToleranceProfile] = None) -> float:
    """E(psi) = -sum p_j log p_j over the Schmidt weights"""
    return schmidt(psi, dims, tol).entropy(base)


def schmidt_observables(decomposition: SchmidtDecomposition, values: Sequence[float],
                        fill: Optional[float] = None,
                        tol: Optional[ToleranceProfile] = None) -> Tuple[HermitianObservable, HermitianObservable]:
    """
    X = sum lambda_j |phi_j><phi_j| and Y = sum lambda_j |xi_j><xi_j|.

    The orthogonal complement of the Schmidt vectors gets the value ``fill``
    (default: one below the smallest lambda).
    """
    if len(values) != decomposition.rank:
        raise DimensionMismatch(f"Need {decomposition.rank} values, got {len(values)}")
    fill = min(values) - 1.0 if fill is None else fill

    def build(basis: np.ndarray, d: int) -> HermitianObservable:
        pairs = [(values[j], np.outer(basis[:, j], np.conj(basis[:, j]))) for j in range(decomposition.rank)]
        rest = np.eye(d) - sum(p for _, p in pairs)
        if np.linalg.norm(rest) > 0.5:
            pairs.append((fill, rest))
        return HermitianObservable.from_spectrum(pairs, tol)

    d1, d2 = decomposition.dims
    return build(decomposition.left, d1), build(decomposition.right, d2)


def maximally_entangled_state(d: int, u=None) -> np.ndarray:
    """(1/sqrt(d)) sum_j |j> (x) U|j>"""
    u = np.eye(d, dtype=complex) if u is None else np.asarray(u, dtype=complex)
    out = np.zeros(d * d, dtype=complex)
    for j in range(d):
        out = out + tensor(np.eye(d)[j], u[:, j])
    return out / math.sqrt(d)


def bipartite_pc_characterize(x_local: HermitianObservable, y_local: HermitianObservable, psi, dims: Sequence[int],
                              tol: Optional[ToleranceProfile] = None) -> Optional[SchmidtDecomposition]:
    """
    Certified Schmidt decomposition for perfectly correlated X (x) I and I (x) Y.

    psi is sliced by the common-eigenvalue projectors E^X({l}) (x) E^Y({l});
    each slice is Schmidt-decomposed and the pieces are concatenated, so every
    phi_j is an eigenvector of X and every xi_j an eigenvector of Y, both for
    the value recorded in ``values``. Returns None when the pair is not
    perfectly correlated in psi.
    """
    tol = resolve_tol(tol)
    vec = _state_vector(psi)
    d1, d2 = int(dims[0]), int(dims[1])
    if x_local.dim != d1 or y_local.dim != d2:
        raise DimensionMismatch(f"Local observables of dimensions {x_local.dim}, {y_local.dim} for dims {d1} x {d2}")
    state = QuantumState(vector=vec, tol=tol)
    if not is_perfectly_correlated(x_local.extend(d2, 'right'), y_local.extend(d1, 'left'), state, tol).correlated:
        return None

    width = max(x_local.cluster_width, y_local.cluster_width)
    weights, lefts, rights, values = [], [], [], []
    for value, p in x_local.spectrum:
        q = y_local.projector_at(value, width)
        piece = tensor(p, q) @ vec
        if np.linalg.norm(piece) <= tol.tol_zero:
            continue
        u, s, vh = np.linalg.svd(piece.reshape(d1, d2))
        for j in range(len(s)):
            if s[j] ** 2 <= tol.tol_zero ** 2:
                continue
            weights.append(float(s[j] ** 2))
            lefts.append(u[:, j])
            rights.append(vh[j, :])
            values.append(value)

    order = np.argsort(-np.asarray(weights), kind='stable')
    return SchmidtDecomposition(np.asarray(weights)[order],
                                np.column_stack([lefts[k] for k in order]),
                                np.column_stack([rights[k] for k in order]),
                                (d1, d2), [values[k] for k in order])


# ---------------------------------------------------------------------------
# Hardy's conditions
# ---------------------------------------------------------------------------

class HardyObservables(NamedTuple):
    u1: HermitianObservable
    d1: HermitianObservable
    u2: HermitianObservable
    d2: HermitianObservable


def bloch_vector(theta: float, phi: float) -> np.ndarray:
    return np.array([math.cos(theta / 2), np.exp(1j * phi) * math.sin(theta / 2)], dtype=complex)


def _perp(v: np.ndarray) -> np.ndarray:
    return np.array([-np.conj(v[1]), np.conj(v[0])], dtype=complex)


def _unit(v: np.ndarray) -> Optional[np.ndarray]:
    norm = np.linalg.norm(v)
    return None if norm <= 1e-12 else v / norm


def binary_observable(theta: float, phi: float, tol=None) -> HermitianObservable:
    """Projector onto the Bloch vector (theta, phi), as an observable with eigenvalues 1 and 0"""
    return projector_observable(bloch_vector(theta, phi), tol)


def projector_observable(v: np.ndarray, tol=None) -> HermitianObservable:
    p = np.outer(v, np.conj(v))
    return HermitianObservable.from_spectrum([(1.0, p), (0.0, np.eye(2) - p)], tol)


def hardy_probabilities(psi, u1: HermitianObservable, d1: HermitianObservable,
                        u2: HermitianObservable, d2: HermitianObservable) -> List[float]:
    """P(U1=0,U2=1), P(U1=1,D2=0), P(D1=1,U2=0), P(D1=1,D2=0)"""
    vec = _state_vector(psi)

    def joint(a: HermitianObservable, a_val: float, b: HermitianObservable, b_val: float) -> float:
        left = tensor(a.projector_at(a_val), np.eye(2)) @ vec
        right = tensor(np.eye(2), b.projector_at(b_val)) @ vec
        return float(np.vdot(left, right).real)

    return [joint(u1, 0, u2, 1), joint(u1, 1, d2, 0), joint(d1, 1, u2, 0), joint(d1, 1, d2, 0)]


def _check_binary(*observables: HermitianObservable):
    for obs in observables:
        if obs.dim != 2 or not obs.has_spectrum_in([0.0, 1.0]):
            raise SpectrumNotBinary(f"Hardy observables need spectra in {{0, 1}} on C^2, got {obs.values}")


def hardy_check(psi, u_obs: HermitianObservable, d_obs: HermitianObservable,
                u2_obs: Optional[HermitianObservable] = None, d2_obs: Optional[HermitianObservable] = None,
                tol: Optional[ToleranceProfile] = None) -> HardyReport:
    """
    Evaluate Hardy's four conditions for a two-qubit state.

    The first party measures U and D, the second U2 and D2 (defaulting to
    the same pair). For a maximally entangled state whose first three
    probabilities vanish the report carries the chain of perfect
    correlations forced by those conditions, ending with D1 = D2.
    """
    tol = resolve_tol(tol)
    vec = _state_vector(psi)
    if vec.size != 4:
        raise DimensionMismatch(f"Hardy analysis needs a two-qubit state, got length {vec.size}")
    u2_obs = u_obs if u2_obs is None else u2_obs
    d2_obs = d_obs if d2_obs is None else d2_obs
    _check_binary(u_obs, d_obs, u2_obs, d2_obs)

    p1 = float(schmidt(vec, (2, 2), tol).weights[0])
    values = hardy_probabilities(vec, u_obs, d_obs, u2_obs, d2_obs)
    first_three = all(v <= tol.tol_prob for v in values[:3])

    if p1 >= 1.0 - MAXIMAL_TOL:
        verdict, chain = HardyVerdict.PRODUCT_STATE, []
    elif abs(p1 - 0.5) <= MAXIMAL_TOL and first_three:
        verdict, chain = HardyVerdict.BLOCKED_BY_TRANSITIVITY, _correlation_chain(vec, u_obs, d_obs, u2_obs, d2_obs, tol)
    elif first_three and values[3] > tol.tol_prob:
        verdict, chain = HardyVerdict.NONLOCALITY_WITNESSED, []
    else:
        verdict, chain = HardyVerdict.CONDITIONS_UNMET, []
    logger.debug("Hardy check p1=%.6g values=%s verdict=%s", p1, values, verdict.value)
    return HardyReport(p1=p1, condition_values=values, verdict=verdict, correlation_chain=chain)


def _correlation_chain(vec, u1, d1, u2, d2, tol) -> List[List[str]]:
    state = QuantumState(vector=vec, tol=tol)
    named = {'U1': u1.extend(2, 'right'), 'D1': d1.extend(2, 'right'),
             'U2': u2.extend(2, 'left'), 'D2': d2.extend(2, 'left')}
    chain = []
    for a, b in (('U1', 'U2'), ('U1', 'D2'), ('D1', 'U2')):
        if is_perfectly_correlated(named[a], named[b], state, tol).correlated:
            chain.append([a, b])
    # U2 = U1 = D2 and D1 = U2 give D1 = D2
    if len(chain) == 3:
        chain.append(['D1', 'D2'])
        if not is_perfectly_correlated(named['D1'], named['D2'], state, tol).correlated:
            logger.warning("Transitive relation D1 = D2 failed to verify numerically")
    return chain


def hardy_construction(psi, theta: float, phi: float) -> Optional[HardyObservables]:
    """
    Observables satisfying the first three Hardy conditions exactly.

    U1 projects onto the Bloch vector (theta, phi); U2, D2 and D1 are then
    fixed by requiring P(U1=0,U2=1), P(U1=1,D2=0) and P(D1=1,U2=0) to
    vanish. Returns None when a defining vector degenerates to zero.
    """
    c = _state_vector(psi).reshape(2, 2)
    u = bloch_vector(theta, phi)
    u0 = _perp(u)
    w_a = _unit(c.T @ np.conj(u0))
    w_b = _unit(c.T @ np.conj(u))
    if w_a is None or w_b is None:
        return None
    u2 = _perp(w_a)
    u2_0 = _perp(u2)
    w_c = _unit(c @ np.conj(u2_0))
    if w_c is None:
        return None
    d1 = _perp(w_c)
    return HardyObservables(projector_observable(u), projector_observable(d1),
                            projector_observable(u2), projector_observable(w_b))


def hardy_search(psi, resolution: int = 64, seed=None, rounds: int = 3,
                 tol: Optional[ToleranceProfile] = None) -> Optional[HardyObservables]:
    """
    Search for Hardy observables on a non-maximally entangled two-qubit state.

    A resolution x resolution grid over the Bloch angles of U1 is scanned
    (each point completed by hardy_construction) for the largest fourth
    probability, then refined around the best point. Acceptance needs the
    first three probabilities <= 1e-9 and the fourth >= 1e-4.

    This replaces a grid over both the U and D angles with local descent on
    the sum of the first three probabilities: hardy_construction solves the D
    angles in closed form so that sum is zero, leaving only U1 to search.
    A None result is inconclusive.
    """
    tol = resolve_tol(tol)
    vec = _state_vector(psi)
    if vec.size != 4:
        raise DimensionMismatch(f"Hardy search needs a two-qubit state, got length {vec.size}")
    p1 = float(schmidt(vec, (2, 2), tol).weights[0])
    if abs(p1 - 0.5) <= MAXIMAL_TOL or p1 >= 1.0 - MAXIMAL_TOL:
        logger.info("Hardy search skipped: p1=%.6g is maximal or product", p1)
        return None

    rng = make_rng(seed)
    offset = rng.random(2) / resolution

    def score(theta: float, phi: float) -> float:
        found = hardy_construction(vec, theta, phi)
        if found is None:
            return -1.0
        values = hardy_probabilities(vec, *found)
        return values[3] if sum(values[:3]) <= HARDY_ZERO else -1.0

    thetas = (np.arange(resolution) + 0.5 + offset[0]) * math.pi / resolution
    phis = (np.arange(resolution) + offset[1]) * 2 * math.pi / resolution
    best = max(((score(t, f), t, f) for t in thetas for f in phis), key=lambda item: item[0])

    step_t, step_f = math.pi / resolution, 2 * math.pi / resolution
    for _ in range(rounds):
        local = np.linspace(-1.0, 1.0, 9)
        for dt in local:
            for df in local:
                candidate = (score(best[1] + dt * step_t, best[2] + df * step_f),
                             best[1] + dt * step_t, best[2] + df * step_f)
                if candidate[0] > best[0]:
                    best = candidate
        step_t, step_f = step_t / 4, step_f / 4

    if best[0] < HARDY_POSITIVE:
        logger.warning("Hardy search found no accepted observables (best fourth probability %.3e)", best[0])
        return None
    found = hardy_construction(vec, best[1], best[2])
    report = hardy_check(vec, found.u1, found.d1, found.u2, found.d2, tol)
    if report.verdict != HardyVerdict.NONLOCALITY_WITNESSED:
        logger.warning("Hardy search candidate failed re-validation: %s", report.verdict)
        return None
    return found
