import math

import numpy as np
import pytest
from hypothesis import given, settings

from relmod.algebra import AlgebraShape, NotHermitianError, ShapeMismatchError, State, func_calc, p_norm, trace
from relmod.gns import (
    GnsVector,
    apply_left,
    apply_right,
    basis,
    coordinates,
    expectation,
    from_coordinates,
    inner,
    left_matrix,
    right_matrix,
    vector_support_left,
    vector_support_right,
)
from relmod.sampling import random_element, random_hermitian, random_positive, random_state

from conftest import seeds, shapes

ONE = AlgebraShape.single(2)


def test_inner_norm(rng, shape):
    a = random_element(rng, shape)
    assert inner(GnsVector(a), GnsVector(a)).real == pytest.approx(p_norm(a, 2) ** 2, rel=1e-13)
    assert GnsVector(a).norm() == pytest.approx(p_norm(a, 2), rel=1e-13)


def test_inner_shape_mismatch():
    with pytest.raises(ShapeMismatchError):
        inner(GnsVector(ONE.identity()), GnsVector(AlgebraShape.single(3).identity()))


def test_vector_state_both_representations(rng, shape):
    rho = random_state(rng, shape)
    x = random_element(rng, shape)
    xi = GnsVector(rho.sqrt)
    assert inner(xi, apply_left(x, xi)) == pytest.approx(rho(x), rel=1e-10, abs=1e-14)
    assert inner(xi, apply_right(x, xi)) == pytest.approx(rho(x), rel=1e-10, abs=1e-14)


def test_orthogonal_compressions(rng):
    shape = AlgebraShape((2, 2), (0.5, 1.5))
    es = [shape.diag([1, 0, 1, 0]), shape.diag([0, 1, 0, 1])]
    fs = [shape.diag([1, 1, 0, 0]), shape.diag([0, 0, 1, 1])]
    a, b = random_element(rng, shape), random_element(rng, shape)
    for i, e in enumerate(es):
        for j, f in enumerate(fs):
            for k, e2 in enumerate(es):
                for l_, f2 in enumerate(fs):
                    if (i, j) != (k, l_):
                        assert abs(inner(GnsVector(e @ a @ f), GnsVector(e2 @ b @ f2))) < 1e-14


def test_identity_actions(rng, shape):
    v = GnsVector(random_element(rng, shape))
    assert (apply_left(shape.identity(), v) - v).norm() == 0
    assert (apply_right(shape.identity(), v) - v).norm() == 0


def test_left_adjoint(rng, shape):
    x, a, b = (random_element(rng, shape) for _ in range(3))
    lhs = inner(GnsVector(a), apply_left(x, GnsVector(b)))
    rhs = inner(apply_left(x.adjoint(), GnsVector(a)), GnsVector(b))
    assert lhs == pytest.approx(rhs, rel=1e-12)


def test_functional_calculus_commutes_with_pi(rng, shape):
    x = random_hermitian(rng, shape)
    a = GnsVector(random_element(rng, shape))
    lx = left_matrix(x)
    lhs = coordinates(apply_left(func_calc(x, lambda t: t * t), a))
    np.testing.assert_allclose(lhs, lx @ lx @ coordinates(a), atol=1e-12)


def test_basis_is_orthonormal(shape):
    vecs = [v for *_, v in basis(shape)]
    gram = np.array([[inner(u, v) for v in vecs] for u in vecs])
    np.testing.assert_allclose(gram, np.eye(shape.hilbert_dim), atol=1e-14)


def test_coordinates_roundtrip(rng, shape):
    v = GnsVector(random_element(rng, shape))
    c = coordinates(v)
    assert np.vdot(c, c).real == pytest.approx(v.norm() ** 2, rel=1e-13)
    assert (from_coordinates(shape, c) - v).norm() < 1e-14


def test_vector_supports_examples():
    v = GnsVector(ONE.diag([math.sqrt(0.5), 0]))
    for s in (vector_support_left(v), vector_support_right(v)):
        np.testing.assert_allclose(s.blocks[0], np.diag([1, 0]), atol=1e-15)
    faithful = GnsVector(ONE.diag([0.6, 0.8]))
    np.testing.assert_allclose(vector_support_left(faithful).blocks[0], np.eye(2), atol=1e-15)


def test_vector_supports_fix_the_vector(rng, shape):
    h = random_positive(rng, shape, [1] * shape.num_blocks)
    st = State(h)
    v = GnsVector(st.sqrt)
    assert (apply_left(vector_support_left(v), v) - v).norm() < 1e-12
    assert (apply_right(vector_support_right(v), v) - v).norm() < 1e-12


def test_expectation_examples():
    for n in (2, 3, 5):
        shape = AlgebraShape.single(n)
        rho = State(shape.identity() / n)
        assert expectation(rho, rho.log) == pytest.approx(-math.log(n), rel=1e-13)
        assert expectation(rho, shape.identity()) == pytest.approx(rho.mass)


def test_expectation_rejects_non_hermitian():
    rho = State(ONE.diag([0.5, 0.5]))
    with pytest.raises(NotHermitianError):
        expectation(rho, ONE.diag([1j, 0]))


@settings(max_examples=40, deadline=None)
@given(seeds, shapes)
def test_expectation_routes_agree(seed, shape):
    rng = np.random.default_rng(seed)
    rho = random_state(rng, shape)
    x = random_hermitian(rng, shape)
    sym = expectation(rho, x)
    for route in ("spectral", "product"):
        assert expectation(rho, x, route) == pytest.approx(sym, rel=1e-10, abs=1e-12)
    assert expectation(rho, x @ x) >= 0


@settings(max_examples=30, deadline=None)
@given(seeds, shapes)
def test_representation_laws(seed, shape):
    rng = np.random.default_rng(seed)
    x, y, a = (random_element(rng, shape) for _ in range(3))
    v = GnsVector(a)
    assert (apply_left(x @ y, v) - apply_left(x, apply_left(y, v))).norm() < 1e-10
    assert (apply_right(x @ y, v) - apply_right(y, apply_right(x, v))).norm() < 1e-10
    assert (apply_left(x, apply_right(y, v)) - apply_right(y, apply_left(x, v))).norm() < 1e-10
    lhs = apply_left(x, v).norm() ** 2
    assert lhs == pytest.approx(trace(a.adjoint() @ x.adjoint() @ x @ a).real, rel=1e-10)


@settings(max_examples=20, deadline=None)
@given(seeds, shapes)
def test_dense_commutant(seed, shape):
    rng = np.random.default_rng(seed)
    lx, ry = left_matrix(random_element(rng, shape)), right_matrix(random_element(rng, shape))
    assert np.max(np.abs(lx @ ry - ry @ lx)) < 1e-10
