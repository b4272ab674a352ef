import math

import numpy as np
import pytest
from hypothesis import given, settings

from relmod.algebra import (
    AlgebraShape,
    Element,
    NotHermitianError,
    NotPositiveError,
    ShapeMismatchError,
    State,
    func_calc,
    p_norm,
    spectral_decompose,
    support,
    tail_trace,
    trace,
    truncate,
    w_transform,
)
from relmod.sampling import random_element, random_hermitian, random_positive, random_ranks

from conftest import seeds, shapes

ONE = AlgebraShape.single(2)


def test_shape_validation():
    with pytest.raises(ValueError):
        AlgebraShape((), ())
    with pytest.raises(ValueError):
        AlgebraShape((2,), (1.0, 2.0))
    with pytest.raises(ValueError, match="faithful"):
        AlgebraShape((2,), (0.0,))
    with pytest.raises(ValueError):
        AlgebraShape((0,), (1.0,))


def test_element_rejects_bad_blocks():
    with pytest.raises(ShapeMismatchError):
        Element(ONE, [np.eye(3)])
    with pytest.raises(ValueError):
        Element(ONE, [np.array([[np.nan, 0], [0, 1]])])
    with pytest.raises(ShapeMismatchError):
        ONE.identity() + AlgebraShape.single(3).identity()


def test_trace_examples():
    assert trace(ONE.identity()) == 2
    assert trace(AlgebraShape((1, 1), (0.5, 2.0)).identity()) == pytest.approx(2.5)


def test_trace_matches_entrywise_sum(rng):
    shape = AlgebraShape((2, 3), (1.0, 0.25))
    x = random_hermitian(rng, shape)
    expected = sum(w * sum(b[i, i] for i in range(b.shape[0])) for w, b in zip(shape.weights, x.blocks))
    t = trace(x)
    assert abs(t.imag) < 1e-14
    assert t.real == pytest.approx(expected.real, rel=1e-13)


def test_p_norm_examples():
    assert p_norm(ONE.diag([3, -4]), 2) == pytest.approx(5.0)
    assert p_norm(ONE.identity(), 1) == pytest.approx(2.0)
    assert p_norm(ONE.diag([3, -4]), math.inf) == pytest.approx(4.0)
    with pytest.raises(ValueError):
        p_norm(ONE.identity(), 0.5)


def test_spectral_examples():
    spec = spectral_decompose(AlgebraShape.single(3).diag([1, 1, 2]))
    np.testing.assert_allclose(spec.eigenvalues, [1, 2])
    assert spec.ranks().ravel().tolist() == [2, 1]
    spec = spectral_decompose(Element(ONE, [[[0, 1], [1, 0]]]))
    np.testing.assert_allclose(spec.eigenvalues, [-1, 1], atol=1e-15)
    assert spec.ranks().ravel().tolist() == [1, 1]


def test_spectral_rejects_non_hermitian():
    with pytest.raises(NotHermitianError):
        spectral_decompose(Element(ONE, [[[0, 1], [0, 0]]]))


def test_func_calc_examples():
    out = func_calc(ONE.diag([1, math.e]), np.log)
    np.testing.assert_allclose(out.blocks[0], np.diag([0, 1]), atol=1e-14)
    out = func_calc(ONE.diag([2, 0]), lambda t: np.where(t != 0, 1 / np.where(t != 0, t, 1), 0.0))
    np.testing.assert_allclose(out.blocks[0], np.diag([0.5, 0]), atol=1e-15)
    with pytest.raises(ValueError):
        func_calc(ONE.diag([0.0, 1.0]), lambda t: np.log(t) if t > 0.5 else math.inf)


def test_support_examples():
    s = support(AlgebraShape.single(3).diag([0, 0.3, 0.7]))
    np.testing.assert_allclose(s.blocks[0], np.diag([0, 1, 1]), atol=1e-15)
    assert support(ONE.zeros()).op_norm() == 0
    v = np.array([1.0, 2.0j]) / math.sqrt(5)
    h = Element(ONE, [np.outer(v, v.conj())])
    s = support(h)
    np.testing.assert_allclose(s.blocks[0], h.blocks[0], atol=1e-14)
    assert (s @ h - h).op_norm() < 1e-14
    with pytest.raises(NotPositiveError):
        support(ONE.diag([1.0, -0.5]))


def test_w_transform_examples():
    np.testing.assert_allclose(w_transform(ONE.diag([2, 0])).blocks[0], np.diag([0.5, 0]), atol=1e-15)
    np.testing.assert_allclose(w_transform(ONE.identity()).blocks[0], np.eye(2), atol=1e-15)


def test_truncate_examples():
    x = AlgebraShape.single(3).diag([-5, 0.5, 3])
    np.testing.assert_allclose(truncate(x, 1).blocks[0], np.diag([0, 0.5, 0]), atol=1e-15)
    assert (truncate(x, x.op_norm()) - x).op_norm() < 1e-14
    with pytest.raises(ValueError):
        truncate(x, 0)


def test_tail_trace_examples():
    x = AlgebraShape.single(3).diag([0.1, 2, 3])
    assert tail_trace(x, 1) == 2
    assert tail_trace(x, 3.5) == 0


def test_state_requires_positive_mass():
    with pytest.raises(NotPositiveError):
        State(ONE.zeros())
    with pytest.raises(NotPositiveError):
        State(ONE.diag([0.5, -0.01]))


def test_state_keeps_mass_unnormalized():
    st = State(ONE.diag([2.0, 1.0]))
    assert st.mass == pytest.approx(3.0)
    assert st.normalized().mass == pytest.approx(1.0)


@settings(max_examples=40, deadline=None)
@given(seeds, shapes)
def test_spectral_reconstruction_property(seed, shape):
    x = random_hermitian(np.random.default_rng(seed), shape)
    spec = spectral_decompose(x)
    assert (spec.reconstruct() - x).op_norm() <= 1e-10 * max(1, x.op_norm())
    total = shape.zeros()
    for i, e in enumerate(spec.projections):
        total = total + e
        for j, f in enumerate(spec.projections):
            assert (e @ f - (e if i == j else shape.zeros())).op_norm() <= 1e-10
    assert (total - shape.identity()).op_norm() <= 1e-10


@settings(max_examples=40, deadline=None)
@given(seeds, shapes)
def test_traciality_and_faithfulness(seed, shape):
    rng = np.random.default_rng(seed)
    x, y = random_element(rng, shape), random_element(rng, shape)
    assert abs(trace(x @ y) - trace(y @ x)) <= 1e-10 * max(1, abs(trace(x @ y)))
    u = x / x.op_norm()
    assert trace(u.adjoint() @ u).real >= min(shape.weights) * (1 - 1e-12)


@settings(max_examples=40, deadline=None)
@given(seeds, shapes)
def test_holder(seed, shape):
    rng = np.random.default_rng(seed)
    x, y = random_element(rng, shape), random_element(rng, shape)
    for p, q, r in ((2, 2, 1), (4, 4, 2), (3, 1.5, 1)):
        assert p_norm(x @ y, r) <= p_norm(x, p) * p_norm(y, q) * (1 + 1e-9)


@settings(max_examples=40, deadline=None)
@given(seeds, shapes)
def test_chebyshev(seed, shape):
    x = random_element(np.random.default_rng(seed), shape)
    for eps in (0.2, 0.7, 1.5):
        for p in (1, 2, 4):
            assert tail_trace(x, eps) <= p_norm(x, p) ** p / eps ** p * (1 + 1e-9)


@settings(max_examples=30, deadline=None)
@given(seeds, shapes)
def test_w_transform_involution(seed, shape):
    rng = np.random.default_rng(seed)
    h = random_positive(rng, shape, random_ranks(rng, shape))
    ht = w_transform(h)
    assert (h @ ht - support(h)).op_norm() < 1e-9
    assert (w_transform(ht) - h).op_norm() < 1e-9 * max(1, h.op_norm())


@settings(max_examples=30, deadline=None)
@given(seeds, shapes)
def test_truncation_monotone(seed, shape):
    x = random_hermitian(np.random.default_rng(seed), shape)
    errs = [p_norm(x - truncate(x, n), 2) for n in np.linspace(0.05, 1, 10) * x.op_norm()]
    assert all(b <= a + 1e-12 for a, b in zip(errs, errs[1:]))
    assert errs[-1] < 1e-12


def test_tail_trace_of_convergent_sequence(rng):
    shape = AlgebraShape((2, 2), (0.5, 1.5))
    x, z = random_element(rng, shape), random_element(rng, shape)
    tails = [tail_trace((x + 0.5 ** n * z) - x, 0.05) for n in range(40)]
    assert all(b <= a for a, b in zip(tails, tails[1:]))
    assert tails[-1] == 0
