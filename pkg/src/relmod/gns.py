"""The GNS space ``H = L^2(M, tau)`` and the two standard actions on it.

Vectors are carried by algebra elements: ``Lambda(a)`` is ``GnsVector(a)``.
``pi(x)`` multiplies carriers on the left, ``pi'(x)`` on the right.

For dense cross-checks ``H`` gets the orthonormal basis
``w_k^{-1/2} E^{(k)}_{pq}``, ordered block-major then row-major;
``coordinates`` and ``from_coordinates`` convert to and from ``C^D``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import (
    AlgebraShape,
    Element,
    NotHermitianError,
    ShapeMismatchError,
    State,
    positive_spectrum,
    spectral_decompose,
    trace,
)


@dataclass(frozen=True, eq=False)
class GnsVector:
    carrier: Element

    @property
    def shape(self) -> AlgebraShape:
        return self.carrier.shape

    def __add__(self, other: GnsVector) -> GnsVector:
        return GnsVector(self.carrier + other.carrier)

    def __sub__(self, other: GnsVector) -> GnsVector:
        return GnsVector(self.carrier - other.carrier)

    def __mul__(self, c) -> GnsVector:
        return GnsVector(c * self.carrier)

    __rmul__ = __mul__

    def norm(self) -> float:
        return float(np.sqrt(max(inner(self, self).real, 0.0)))


def vec(a: Element) -> GnsVector:
    """``Lambda(a)``."""
    return GnsVector(a)


def _same_shape(a: AlgebraShape, b: AlgebraShape):
    if a != b:
        raise ShapeMismatchError(f"{a} vs {b}")


def inner(a: GnsVector, b: GnsVector) -> complex:
    """``<a|b> = tau(a* b)``, antilinear in the first slot."""
    _same_shape(a.shape, b.shape)
    return complex(
        sum(
            w * np.vdot(x, y)
            for w, x, y in zip(a.shape.weights, a.carrier.blocks, b.carrier.blocks)
        )
    )


def distance(u: GnsVector, v: GnsVector) -> float:
    return (u - v).norm()


def apply_left(x: Element, v: GnsVector) -> GnsVector:
    """``pi(x) Lambda(a) = Lambda(x a)``."""
    _same_shape(x.shape, v.shape)
    return GnsVector(x @ v.carrier)


def apply_right(x: Element, v: GnsVector) -> GnsVector:
    """``pi'(x) Lambda(a) = Lambda(a x)``."""
    _same_shape(x.shape, v.shape)
    return GnsVector(v.carrier @ x)


def _positive_root_support(v: GnsVector) -> Element:
    spec = positive_spectrum(v.carrier)
    return spec.assemble((spec.eigenvalues > 0).astype(float))


def vector_support_left(v: GnsVector) -> Element:
    """Support of ``Lambda(h^(1/2))`` in ``pi(M)``, as the algebra projection ``s(h)``."""
    return _positive_root_support(v)


def vector_support_right(v: GnsVector) -> Element:
    """Support of ``Lambda(h^(1/2))`` in ``pi'(M)``; the same projection, acting on the right."""
    return _positive_root_support(v)


def _expect_density(h_sqrt: Element, x: Element) -> float:
    return trace(h_sqrt @ x @ h_sqrt).real


def expectation(rho: State, x: Element, route: str = "symmetric") -> float:
    """``rho(x)`` for Hermitian ``x``.

    Routes: ``"symmetric"`` evaluates ``tau(h^(1/2) x h^(1/2))``,
    ``"spectral"`` sums ``lambda_i rho(e_i)`` over the spectrum of ``x``,
    ``"product"`` evaluates ``tau(h x)``.
    """
    _same_shape(rho.shape, x.shape)
    if not x.is_hermitian():
        raise NotHermitianError("expectation needs a Hermitian element")
    if route == "symmetric":
        return _expect_density(rho.sqrt, x)
    if route == "spectral":
        spec = spectral_decompose(x)
        return float(sum(lam * rho(e).real for lam, e in zip(spec.eigenvalues, spec.projections)))
    if route == "product":
        return trace(rho.density @ x).real
    raise ValueError(f"unknown route {route!r}")


def coordinates(v: GnsVector | Element) -> np.ndarray:
    """Coordinates in the weighted matrix-unit basis (an isometry onto ``C^D``)."""
    a = v.carrier if isinstance(v, GnsVector) else v
    return np.concatenate(
        [np.sqrt(w) * b.ravel() for w, b in zip(a.shape.weights, a.blocks)]
    )


def from_coordinates(shape: AlgebraShape, c: np.ndarray) -> GnsVector:
    c = np.asarray(c, dtype=complex)
    if c.shape != (shape.hilbert_dim,):
        raise ShapeMismatchError(f"expected {shape.hilbert_dim} coordinates, got {c.shape}")
    blocks, start = [], 0
    for n, w in zip(shape.block_dims, shape.weights):
        blocks.append(c[start:start + n * n].reshape(n, n) / np.sqrt(w))
        start += n * n
    return GnsVector(Element(shape, blocks))


def basis(shape: AlgebraShape):
    """Yield ``(index, block, p, q, vector)`` for the orthonormal basis of ``H``."""
    idx = 0
    for k, (n, w) in enumerate(zip(shape.block_dims, shape.weights)):
        for p in range(n):
            for q in range(n):
                blocks = [np.zeros((m, m), dtype=complex) for m in shape.block_dims]
                blocks[k][p, q] = 1 / np.sqrt(w)
                yield idx, k, p, q, GnsVector(Element(shape, blocks))
                idx += 1


def operator_matrix(shape: AlgebraShape, op) -> np.ndarray:
    """Dense matrix of a linear map ``op: GnsVector -> GnsVector`` on ``H``."""
    d = shape.hilbert_dim
    out = np.zeros((d, d), dtype=complex)
    for idx, _, _, _, b in basis(shape):
        out[:, idx] = coordinates(op(b))
    return out


def left_matrix(x: Element) -> np.ndarray:
    """Dense matrix of ``pi(x)``."""
    return operator_matrix(x.shape, lambda v: apply_left(x, v))


def right_matrix(x: Element) -> np.ndarray:
    """Dense matrix of ``pi'(x)``."""
    return operator_matrix(x.shape, lambda v: apply_right(x, v))
