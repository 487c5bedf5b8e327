"""
Commutative domains, joint probability distributions and characteristic functions.
"""
import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import IncompatiblePair, InvalidState
from .correlation import _check_dims, _cross_value
from .linalg_core import (
    Subspace,
    ToleranceProfile,
    complex_to_json,
    largest_common_kernel,
    make_rng,
    resolve_tol,
    round_sig,
)
from .models import (
    ConditionReport,
    JointCell,
    JointDistributionRecord,
    MeasurementOrder,
    PairTally,
    SampledRun,
    Witness,
)
from .spectral import HermitianObservable, projection_meet
from .states import QuantumState

logger = logging.getLogger(__name__)

GRID_VALUES = np.linspace(-3.0, 3.0, 21)


def commutative_domain(x: HermitianObservable, y: HermitianObservable,
                       tol: Optional[ToleranceProfile] = None) -> Subspace:
    """com(X, Y): vectors annihilated by every commutator [E^X({lambda}), E^Y({mu})]"""
    tol = resolve_tol(tol)
    _check_dims(x.dim, y.dim)
    commutators = [p @ q - q @ p for p in x.projectors for q in y.projectors]
    domain = largest_common_kernel(commutators, tol)
    for p in x.projectors + y.projectors:
        if not domain.is_invariant_under(p, tol):
            logger.warning("Commutative domain of dimension %d is not invariant under a spectral projector",
                           domain.dim)
            break
    return domain


def compatibility_projector(x: HermitianObservable, y: HermitianObservable,
                            tol: Optional[ToleranceProfile] = None) -> np.ndarray:
    """C_{X,Y}"""
    return commutative_domain(x, y, tol).projector()


def _is_compatible(x, y, s: QuantumState, tol: ToleranceProfile) -> Tuple[bool, float]:
    c = compatibility_projector(x, y, tol)
    residual = float(np.linalg.norm(c @ s.density - s.density, 2))
    return residual <= tol.tol_zero * 10, residual


def _cells(x: HermitianObservable, y: HermitianObservable):
    for lam, p in x.spectrum:
        for mu, q in y.spectrum:
            yield lam, mu, p, q


def _improper_mass(value: complex) -> float:
    """Size of the imaginary or negative part of a cell value"""
    return max(abs(value.imag), -value.real, 0.0)


def joint_distribution(x: HermitianObservable, y: HermitianObservable, s: QuantumState,
                       tol: Optional[ToleranceProfile] = None) -> JointDistributionRecord:
    """
    Joint probability distribution of X and Y in s.

    Present exactly when C_{X,Y} rho = rho. Cells carry Tr[E^X E^Y rho] and
    the meet value Tr[(E^X ^ E^Y) rho]. When absent the record names the cell
    whose Tr[E^X E^Y rho] has the largest imaginary or negative mass, ties
    going to the larger commutator residual ||(E^X E^Y - E^Y E^X) rho||.
    A compatible pair whose cells leave the nonnegative range by more than
    tol_prob keeps the offending cell in ``violation``.
    """
    tol = resolve_tol(tol)
    _check_dims(x.dim, y.dim, s.dim)
    compatible, _ = _is_compatible(x, y, s, tol)

    if not compatible:
        worst, worst_key, worst_value, worst_residual = None, None, 0j, 0.0
        for lam, mu, p, q in _cells(x, y):
            value = _cross_value(p, q, s)
            residual = float(np.linalg.norm(p @ q @ s.density - q @ p @ s.density, 2))
            mass = _improper_mass(value)
            key = (mass if mass > tol.tol_prob else 0.0, residual)
            if worst_key is None or key > worst_key:
                worst_key, worst_value, worst_residual = key, value, residual
                worst = Witness(lambda_=lam, mu=mu, magnitude=mass)
        logger.debug("No joint distribution: worst cell (%.6g, %.6g) with mass %.3e",
                     worst.lambda_, worst.mu, worst.magnitude)
        return JointDistributionRecord(present=False, violation=worst,
                                       violation_value=[worst_value.real, worst_value.imag],
                                       commutator_residual=worst_residual)

    width = max(x.cluster_width, y.cluster_width)
    cells = []
    off_diagonal = 0.0
    violation: Optional[Witness] = None
    violation_value = None
    for lam, mu, p, q in _cells(x, y):
        value = _cross_value(p, q, s)
        mass = _improper_mass(value)
        if mass > tol.tol_prob and (violation is None or mass > violation.magnitude):
            violation = Witness(lambda_=lam, mu=mu, magnitude=mass)
            violation_value = [value.real, value.imag]
        meet = float(s.expectation(projection_meet(p, q, tol)).real)
        prob = max(value.real, 0.0)
        cells.append(JointCell(x=lam, y=mu, p=prob, meet=meet))
        if abs(lam - mu) > width:
            off_diagonal += prob
    if violation is not None:
        logger.warning("Compatible cell (%.6g, %.6g) has improper mass %.3e",
                       violation.lambda_, violation.mu, violation.magnitude)
    return JointDistributionRecord(present=True, cells=cells, off_diagonal_mass=off_diagonal,
                                   violation=violation, violation_value=violation_value)


def compatibility_conditions(x: HermitianObservable, y: HermitianObservable, s: QuantumState,
                             tol: Optional[ToleranceProfile] = None) -> ConditionReport:
    """
    Equivalent forms of compatibility in a state.

    i    C_{X,Y} rho = rho
    ii   E^X({lambda}) E^Y({mu}) rho = (E^X({lambda}) ^ E^Y({mu})) rho on every cell
    iii  the meet values Tr[(E^X ^ E^Y) rho] sum to one (they form a probability measure)
    iv   E^X({lambda}) E^Y({mu}) rho = E^Y({mu}) E^X({lambda}) rho on every cell
    """
    tol = resolve_tol(tol)
    _check_dims(x.dim, y.dim, s.dim)
    rho = s.density
    conditions, residuals = {}, {}

    conditions['i'], residuals['i'] = _is_compatible(x, y, s, tol)

    res_ii = res_iv = 0.0
    meet_mass = 0.0
    for _, _, p, q in _cells(x, y):
        meet = projection_meet(p, q, tol)
        meet_mass += float(np.trace(meet @ rho).real)
        res_ii = max(res_ii, float(np.linalg.norm(p @ q @ rho - meet @ rho, 2)))
        res_iv = max(res_iv, float(np.linalg.norm(p @ q @ rho - q @ p @ rho, 2)))
    conditions['ii'] = res_ii <= tol.tol_zero * 10
    residuals['ii'] = res_ii
    conditions['iii'] = abs(meet_mass - 1.0) <= tol.tol_prob * 10
    residuals['iii'] = abs(meet_mass - 1.0)
    conditions['iv'] = res_iv <= tol.tol_zero * 10
    residuals['iv'] = res_iv

    return ConditionReport(holds=conditions['i'], conditions=conditions, residuals=residuals)


def joint_measurability_check(x: HermitianObservable, y: HermitianObservable, s: QuantumState,
                              tol: Optional[ToleranceProfile] = None) -> Tuple[bool, float]:
    """
    Compare every cell of the joint distribution with both sandwich forms
    Tr[E^X E^Y E^X rho] and Tr[E^Y E^X E^Y rho].

    Returns (jointly measurable, max residual).

    Raises:
        IncompatiblePair: if X and Y have no joint distribution in s
    """
    tol = resolve_tol(tol)
    record = joint_distribution(x, y, s, tol)
    if not record.present:
        raise IncompatiblePair("Observables are not compatible in the given state")
    residual = 0.0
    for cell in record.cells:
        p = x.projector_at(cell.x)
        q = y.projector_at(cell.y)
        jo1 = s.expectation(p @ q @ p)
        jo2 = s.expectation(q @ p @ q)
        residual = max(residual, abs(cell.p - jo1), abs(cell.p - jo2))
    return residual <= tol.tol_zero * 10, residual


def diagonal_concentration(x: HermitianObservable, y: HermitianObservable, s: QuantumState,
                           tol: Optional[ToleranceProfile] = None) -> Tuple[bool, Optional[float]]:
    """(joint distribution exists and puts no mass off the diagonal, off-diagonal mass or None)"""
    tol = resolve_tol(tol)
    record = joint_distribution(x, y, s, tol)
    if not record.present:
        return False, None
    return record.off_diagonal_mass <= tol.tol_prob, record.off_diagonal_mass


# ---------------------------------------------------------------------------
# Successive measurements
# ---------------------------------------------------------------------------

def _born(probs: Sequence[float]) -> np.ndarray:
    arr = np.clip(np.asarray(probs, dtype=float), 0.0, None)
    return arr / arr.sum()


def _inverse_cdf(probs: np.ndarray, u: np.ndarray) -> np.ndarray:
    cdf = np.cumsum(probs)
    cdf[-1] = 1.0
    return np.minimum(np.searchsorted(cdf, u, side='right'), len(probs) - 1)


def sandwich_distribution(first: HermitianObservable, second: HermitianObservable,
                          s: QuantumState) -> np.ndarray:
    """q[i, j] = Tr[Q_j P_i rho P_i], the joint law of measuring ``first`` then ``second``"""
    rho = s.density
    out = np.zeros((len(first.spectrum), len(second.spectrum)))
    for i, p in enumerate(first.projectors):
        collapsed = p @ rho @ p
        for j, q in enumerate(second.projectors):
            out[i, j] = float(np.trace(q @ collapsed).real)
    return out


def successive_measurement(x: HermitianObservable, y: HermitianObservable, s: QuantumState,
                           order: MeasurementOrder = MeasurementOrder.XY, n: int = 1000,
                           seed=None, tol: Optional[ToleranceProfile] = None) -> SampledRun:
    """
    Simulate n rounds of projective measurement of one observable followed by the other.

    Each round samples the first outcome from the Born rule, collapses the
    state onto the observed eigenspace and samples the second outcome from
    the collapsed state. Pair tallies are reported as (x value, y value).
    """
    tol = resolve_tol(tol)
    _check_dims(x.dim, y.dim, s.dim)
    order = MeasurementOrder(order)
    rng = make_rng(seed)
    first, second = (x, y) if order == MeasurementOrder.XY else (y, x)
    rho = s.density

    first_probs = _born([float(np.trace(p @ rho).real) for p in first.projectors])
    first_idx = _inverse_cdf(first_probs, rng.random(n))
    second_idx = np.zeros(n, dtype=int)
    for i, p in enumerate(first.projectors):
        mask = first_idx == i
        count = int(mask.sum())
        if count == 0:
            continue
        collapsed = p @ rho @ p / first_probs[i]
        cond = _born([float(np.trace(q @ collapsed).real) for q in second.projectors])
        second_idx[mask] = _inverse_cdf(cond, rng.random(count))

    analytic = sandwich_distribution(first, second, s)
    if order == MeasurementOrder.YX:
        x_idx, y_idx, analytic = second_idx, first_idx, analytic.T
    else:
        x_idx, y_idx = first_idx, second_idx

    counts = np.zeros((len(x.spectrum), len(y.spectrum)), dtype=int)
    np.add.at(counts, (x_idx, y_idx), 1)
    width = max(x.cluster_width, y.cluster_width)
    tallies = []
    all_equal = True
    for i, lam in enumerate(x.values):
        for j, mu in enumerate(y.values):
            prob = min(max(float(analytic[i, j]), 0.0), 1.0)
            c = int(counts[i, j])
            if c == 0 and prob <= tol.tol_prob:
                continue
            if c > 0 and abs(lam - mu) > width:
                all_equal = False
            tallies.append(PairTally(x=lam, y=mu, count=c, frequency=c / n,
                                     stderr=float(np.sqrt(prob * (1 - prob) / n)), probability=prob))
    logger.debug("Sampled %d successive measurements in order %s", n, order.value)
    return SampledRun(n=n, seed=seed if isinstance(seed, int) else None, order=order,
                      pair_tallies=tallies, all_equal=all_equal)


# ---------------------------------------------------------------------------
# Characteristic functions
# ---------------------------------------------------------------------------

class CharacteristicSample:
    """Phi and Psi evaluated on a grid of (a, b, t) points"""

    def __init__(self, grid: List[Tuple[float, float, float]], phi_values, psi_values):
        self.grid = grid
        self.phi_values = None if phi_values is None else np.asarray(phi_values, dtype=complex)
        self.psi_values = np.asarray(psi_values, dtype=complex)

    def to_json(self) -> dict:
        return {
            'grid': [[round_sig(a), round_sig(b), round_sig(t)] for a, b, t in self.grid],
            'phi': None if self.phi_values is None else [complex_to_json(z) for z in self.phi_values],
            'psi': [complex_to_json(z) for z in self.psi_values],
        }


def default_grid(values: Sequence[float] = GRID_VALUES) -> List[Tuple[float, float, float]]:
    """(t, s, 1) over a square grid of t and s"""
    return [(float(a), float(b), 1.0) for a in values for b in values]


def _quasi_cells(x: HermitianObservable, y: HermitianObservable, psi: np.ndarray):
    lams = np.array(x.values)
    mus = np.array(y.values)
    cells = np.array([[np.vdot(p @ psi, q @ psi) for q in y.projectors] for p in x.projectors])
    return lams, mus, cells


def psi_function(x: HermitianObservable, y: HermitianObservable, psi: np.ndarray,
                 grid: Sequence[Tuple[float, float, float]]) -> np.ndarray:
    """Psi_{a,b}(t) = <e^{-itaX} psi, e^{itbY} psi>"""
    lams, mus, cells = _quasi_cells(x, y, psi)
    out = np.empty(len(grid), dtype=complex)
    for k, (a, b, t) in enumerate(grid):
        phase = np.exp(1j * t * (a * lams[:, None] + b * mus[None, :]))
        out[k] = np.sum(phase * cells)
    return out


def phi_function(x: HermitianObservable, y: HermitianObservable, psi: np.ndarray,
                 grid: Sequence[Tuple[float, float, float]]) -> np.ndarray:
    """Phi_{a,b}(t) = <psi, e^{it(aX + bY)} psi>"""
    out = np.empty(len(grid), dtype=complex)
    cache = {}
    for k, (a, b, t) in enumerate(grid):
        key = (a, b)
        if key not in cache:
            if b == 0.0:
                spectrum = [(a * v, p) for v, p in x.spectrum]
            elif a == 0.0:
                spectrum = [(b * v, p) for v, p in y.spectrum]
            else:
                spectrum = HermitianObservable(a * x.matrix + b * y.matrix, x._tol).spectrum
            # weights |P psi|^2 are all that Phi needs from each spectral point
            cache[key] = [(v, float(np.vdot(p @ psi, p @ psi).real)) for v, p in spectrum]
        out[k] = sum(np.exp(1j * t * v) * w for v, w in cache[key])
    return out


def characteristic_functions(x: HermitianObservable, y: HermitianObservable, psi: QuantumState,
                             grid: Optional[Sequence[Tuple[float, float, float]]] = None,
                             include_phi: bool = True,
                             tol: Optional[ToleranceProfile] = None) -> CharacteristicSample:
    """Evaluate Phi and Psi at every grid point; Phi and Psi must agree on both axes"""
    tol = resolve_tol(tol)
    if not psi.is_vector:
        raise InvalidState("Characteristic functions need a vector state")
    _check_dims(x.dim, y.dim, psi.dim)
    grid = list(grid) if grid is not None else default_grid()
    psi_vals = psi_function(x, y, psi.vector, grid)
    phi_vals = phi_function(x, y, psi.vector, grid) if include_phi else None

    if np.max(np.abs(psi_vals)) > 1 + tol.tol_prob:
        logger.warning("Psi exceeds unit modulus on the grid")
    if phi_vals is not None:
        axes = [k for k, (a, b, _) in enumerate(grid) if a == 0.0 or b == 0.0]
        if axes and np.max(np.abs(phi_vals[axes] - psi_vals[axes])) > 1e-8:
            logger.warning("Phi and Psi disagree on an axis of the grid")
    return CharacteristicSample(grid, phi_vals, psi_vals)


def psi_shift_residual(x: HermitianObservable, y: HermitianObservable, psi: QuantumState,
                       values: Sequence[float] = GRID_VALUES) -> float:
    """max |Psi_{t,s}(1) - Psi_{t+s,0}(1)| over the grid"""
    grid = default_grid(values)
    shifted = [(a + b, 0.0, 1.0) for a, b, _ in grid]
    return float(np.max(np.abs(psi_function(x, y, psi.vector, grid) - psi_function(x, y, psi.vector, shifted))))


def phi_shift_residual(x: HermitianObservable, y: HermitianObservable, phi: np.ndarray,
                       values: Sequence[float]) -> float:
    """max |Phi_{t,s}(1) - Phi_{t+s,0}(1)| over the grid"""
    grid = default_grid(values)
    shifted = [(a + b, 0.0, 1.0) for a, b, _ in grid]
    return float(np.max(np.abs(phi_function(x, y, phi, grid) - phi_function(x, y, phi, shifted))))
