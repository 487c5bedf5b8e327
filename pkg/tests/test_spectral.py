import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from perfcorr.errors import InvalidPovm, LabelMismatch
from perfcorr.linalg_core import random_hermitian, random_povm_effects
from perfcorr.spectral import (
    EffectFamily,
    HermitianObservable,
    Povm,
    RealFunction,
    RealSet,
    apply_function,
    moment,
    povm_conjugate,
    povm_moment,
    povm_transform_f,
    projection_meet,
    spectral_projector,
    union_spectrum,
)
from perfcorr.states import QuantumState


@settings(max_examples=30, deadline=None)
@given(dim=st.integers(min_value=1, max_value=5), seed=st.integers(min_value=0, max_value=10**6))
def test_spectral_resolution(dim, seed):
    x = HermitianObservable(random_hermitian(dim, seed))
    assert np.allclose(sum(x.projectors), np.eye(dim), atol=1e-10)
    assert np.allclose(sum(v * p for v, p in x.spectrum), x.matrix, atol=1e-9)
    for p in x.projectors:
        assert np.allclose(p @ p, p, atol=1e-10)


def test_degenerate_values_cluster():
    x = HermitianObservable(np.diag([1.0, 1.0 + 1e-12, 2.0]))
    assert len(x.values) == 2
    assert np.allclose(x.projector_at(1.0), np.diag([1, 1, 0]))
    assert not x.is_nondegenerate()
    assert np.allclose(x.projector_at(5.0), 0)


def test_functional_calculus_merges_values():
    x = HermitianObservable.diagonal([-1.0, 0.0, 1.0])
    squared = apply_function(x, RealFunction.power(2))
    assert squared.values == [0.0, 1.0]
    assert np.allclose(squared.projector_at(1.0), np.diag([1, 0, 1]))


def test_spectral_projector_of_interval():
    x = HermitianObservable.diagonal([1.0, 1.0, 2.0])
    assert np.allclose(spectral_projector(x, RealSet.interval(None, 1.5)), np.diag([1, 1, 0]))
    assert np.allclose(spectral_projector(x, RealSet.empty()), 0)
    assert np.allclose(spectral_projector(x, RealSet.full_line()), np.eye(3))


def test_real_set_normalization():
    s = RealSet(intervals=[(0.0, 1.0), (0.5, 2.0)], points=[1.5, 3.0])
    assert s.intervals == [(0.0, 2.0)]
    assert s.points == [3.0]
    assert s.contains(0.0) and not s.contains(2.0) and s.contains(3.0)
    with pytest.raises(ValueError):
        RealSet(intervals=[(1.0, 1.0)])


def test_preimages():
    affine = RealFunction.affine(2.0, 1.0)
    pre = affine.preimage(RealSet.interval(3.0, 5.0))
    assert pre.intervals == [(1.0, 2.0)]
    arctan = RealFunction.named('arctan')
    assert arctan.preimage(RealSet.interval(0.0, None)).intervals == [(0.0, None)]
    absolute = RealFunction.named('abs')
    with pytest.raises(ValueError):
        absolute.preimage(RealSet.singleton(1.0))
    assert absolute.preimage(RealSet.singleton(1.0), [-1.0, 0.0, 1.0]).points == [-1.0, 1.0]


def test_function_composition_and_validation():
    f = RealFunction.power(2).compose(RealFunction.affine(1.0, 1.0))
    assert np.isclose(f(2.0), 9.0)
    assert RealFunction.identity().compose(f) is f
    assert RealFunction.from_json(f.to_json())(1.0) == 4.0
    with pytest.raises(ValueError):
        RealFunction(kind='poly')
    with pytest.raises(ValueError):
        RealFunction.named('sinh')


def test_union_spectrum_and_meet():
    x = HermitianObservable.diagonal([1.0, 2.0])
    y = HermitianObservable.diagonal([2.0, 3.0])
    assert union_spectrum(x, y) == [1.0, 2.0, 3.0]
    meet = projection_meet(np.diag([1, 1, 0]), np.diag([0, 1, 1]))
    assert np.allclose(meet, np.diag([0, 1, 0]))


def test_moment_of_state():
    x = HermitianObservable.diagonal([1.0, -2.0])
    s = QuantumState(vector=[np.sqrt(0.5), np.sqrt(0.5)])
    assert np.isclose(moment(x, s, 2), 2.5)


def test_povm_validation(rng):
    effects = random_povm_effects(2, 3, rng)
    p = Povm(list(zip([0.0, 1.0, 2.0], effects)))
    assert np.allclose(p.total(), np.eye(2), atol=1e-10)
    with pytest.raises(LabelMismatch):
        Povm(list(zip([0.0, 0.0, 2.0], effects)))
    with pytest.raises(InvalidPovm):
        Povm([(0.0, np.diag([1.0, 0.0])), (1.0, np.diag([0.5, 0.5]))])
    with pytest.raises(InvalidPovm):
        Povm([(0.0, np.diag([1.5, 0.0])), (1.0, np.diag([-0.5, 1.0]))])


def test_povm_transform_sums_coinciding_labels():
    p = Povm([(-1.0, np.diag([1, 0, 0])), (0.0, np.diag([0, 1, 0])), (1.0, np.diag([0, 0, 1]))])
    folded = povm_transform_f(p, RealFunction.named('abs'))
    assert folded.labels == [0.0, 1.0]
    assert np.allclose(folded.effect_at(1.0), np.diag([1, 0, 1]))
    assert np.allclose(povm_moment(p, RealFunction.identity()), np.diag([-1, 0, 1]))


def test_povm_conjugate_normalization():
    p = Povm.projective(HermitianObservable.diagonal([1.0, -1.0]))
    iso = povm_conjugate(p, np.eye(2))
    assert isinstance(iso, Povm) and iso.normalized
    shrunk = povm_conjugate(p, 0.5 * np.eye(2))
    assert type(shrunk) is EffectFamily and not shrunk.normalized
