"""The relative modular operator ``Delta(phi, omega)`` on ``L^2(M, tau)``.

``Delta`` acts as ``a -> h_phi a w(h_omega)`` where ``w`` is the spectral
pseudo-inverse.  It is kept as paired spectral data: the spectrum
``(alpha_i, e_i)`` of ``h_phi`` and ``(gamma_j, f_j)`` of ``w(h_omega)``.
The projections ``a -> e_i a f_j`` are mutually orthogonal and sum to the
identity on ``H``, and ``Delta`` has value ``alpha_i * gamma_j`` on the
range of each of them.  Any function of ``Delta`` is therefore applied
blockwise in the two eigenbases, with no ``D x D`` matrix involved.
``dense_oracle`` builds that matrix only for cross-checks.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .algebra import AlgebraShape, Element, ShapeMismatchError, SpectralDecomposition, State, w
from .gns import GnsVector

DENSE_CAP = 4096


class DenseCapExceeded(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class RelativeModular:
    phi_spec: SpectralDecomposition
    omega_tilde_spec: SpectralDecomposition
    supports: tuple[Element, Element]
    shape: AlgebraShape
    h_phi: Element
    h_omega_tilde: Element

    def pair_values(self) -> np.ndarray:
        """``mu[i, j] = alpha_i * gamma_j``."""
        return np.outer(self.phi_spec.eigenvalues, self.omega_tilde_spec.eigenvalues)

    def multiplicities(self) -> np.ndarray:
        """Dimension of the range of ``a -> e_i a f_j``: ``sum_k rank_k(e_i) rank_k(f_j)``."""
        return self.phi_spec.ranks() @ self.omega_tilde_spec.ranks().T

    def eigenvalues(self) -> np.ndarray:
        """Sorted eigenvalue multiset of ``Delta`` (length ``D``)."""
        mu, mult = self.pair_values(), self.multiplicities()
        return np.sort(np.repeat(mu.ravel(), mult.ravel()))

    def _rotated(self, a: Element):
        """Carrier blocks in the eigenbases: ``U_k^* a_k V_k`` with group labels."""
        out = []
        for (u, li), (v, lj), blk in zip(self.phi_spec.bases, self.omega_tilde_spec.bases, a.blocks):
            out.append((u, li, v, lj, u.conj().T @ blk @ v))
        return out

    def spectral_weights(self, v: GnsVector) -> np.ndarray:
        """``W[i, j] = ||e_i a f_j||_H^2`` for ``v = Lambda(a)``."""
        _check(self.shape, v.shape)
        weights = np.zeros((len(self.phi_spec), len(self.omega_tilde_spec)))
        for wk, (_, li, _, lj, c) in zip(self.shape.weights, self._rotated(v.carrier)):
            np.add.at(weights, (li[:, None], lj[None, :]), wk * np.abs(c) ** 2)
        return weights

    def apply_function(self, f: Callable[[np.ndarray], np.ndarray], v: GnsVector) -> GnsVector:
        """``f(Delta) v`` for an ``f`` evaluated elementwise on the pair values."""
        _check(self.shape, v.shape)
        fmu = np.asarray(f(self.pair_values()), dtype=complex)
        blocks = []
        for u, li, vv, lj, c in self._rotated(v.carrier):
            blocks.append(u @ (fmu[li[:, None], lj[None, :]] * c) @ vv.conj().T)
        return GnsVector(Element(self.shape, blocks))


def _check(a: AlgebraShape, b: AlgebraShape):
    if a != b:
        raise ShapeMismatchError(f"{a} vs {b}")


def build_delta(phi: State, omega: State) -> RelativeModular:
    """Paired spectral data of ``Delta(phi, omega)``."""
    _check(phi.shape, omega.shape)
    omega_tilde = omega.spectrum.map(w)
    return RelativeModular(
        phi_spec=phi.spectrum,
        omega_tilde_spec=omega_tilde,
        supports=(phi.support, omega.support),
        shape=phi.shape,
        h_phi=phi.density,
        h_omega_tilde=omega_tilde.reconstruct(),
    )


def _mu_power(s: float):
    def f(mu):
        if s == 0:
            return (mu > 0).astype(float)
        return np.where(mu > 0, np.abs(mu) ** s, 0.0)

    return f


def delta_power_apply(delta: RelativeModular, s: float, v: GnsVector) -> GnsVector:
    """``Delta^s v``; ``Delta^0`` is the support projection of ``Delta``."""
    if not s >= 0:
        raise ValueError(f"power must be >= 0, got {s}")
    return delta.apply_function(_mu_power(s), v)


def s_operator_apply(phi: State, omega: State, x: Element) -> GnsVector:
    """Araki's ``S``: ``Lambda(x h_omega^(1/2)) -> Lambda(s(omega) x* h_phi^(1/2))``."""
    _check(phi.shape, omega.shape)
    _check(phi.shape, x.shape)
    return GnsVector(omega.support @ x.adjoint() @ phi.sqrt)


def modular_j(v: GnsVector) -> GnsVector:
    """The conjugation ``J``: ``Lambda(a) -> Lambda(a*)``."""
    return GnsVector(v.carrier.adjoint())


@dataclass(frozen=True, eq=False)
class Compression:
    """The map ``a -> left a right`` on ``H``."""

    left: Element
    right: Element

    def __call__(self, v: GnsVector) -> GnsVector:
        return GnsVector(self.left @ v.carrier @ self.right)


def delta_support(delta: RelativeModular) -> Compression:
    """``Delta^0 = pi(s(phi)) pi'(s(omega))``."""
    return Compression(*delta.supports)


def dense_oracle(delta: RelativeModular, cap: int = DENSE_CAP) -> np.ndarray:
    """Dense matrix of ``a -> h_phi a w(h_omega)`` in the orthonormal basis of ``H``.

    Built column by column from the two density matrices, not from the
    spectral pairing, so that it can serve as an independent check.
    """
    d = delta.shape.hilbert_dim
    if d > cap:
        raise DenseCapExceeded(f"Hilbert dimension {d} exceeds dense cap {cap}")
    out = np.zeros((d, d), dtype=complex)
    col = 0
    offset = 0
    for hp, ht in zip(delta.h_phi.blocks, delta.h_omega_tilde.blocks):
        n = hp.shape[0]
        for p in range(n):
            for q in range(n):
                # h E_pq h~ = outer(h[:, p], h~[q, :]); block weights cancel
                out[offset:offset + n * n, col] = np.outer(hp[:, p], ht[q, :]).ravel()
                col += 1
        offset += n * n
    return out


def dense_eigenvalues(delta: RelativeModular, cap: int = DENSE_CAP) -> np.ndarray:
    return np.linalg.eigvalsh(dense_oracle(delta, cap))


def dense_support_projection(matrix: np.ndarray, rel_tol: float = 1e-9) -> np.ndarray:
    """Projection onto the eigenvectors of a PSD matrix above ``rel_tol * max(1, ||M||)``."""
    vals, vecs = np.linalg.eigh((matrix + matrix.conj().T) / 2)
    keep = vals > rel_tol * max(1.0, float(np.max(np.abs(vals))))
    v = vecs[:, keep]
    return v @ v.conj().T


def dense_power(matrix: np.ndarray, s: float, rel_tol: float = 1e-12) -> np.ndarray:
    """``M^s`` for a PSD matrix, with ``0^s = 0`` (also for ``s = 0``)."""
    vals, vecs = np.linalg.eigh((matrix + matrix.conj().T) / 2)
    cut = rel_tol * max(1.0, float(np.max(np.abs(vals))))
    pw = np.where(vals > cut, np.abs(vals) ** s, 0.0)
    return (vecs * pw) @ vecs.conj().T


def compare_multisets(a: np.ndarray, b: np.ndarray) -> float:
    """Largest scaled gap between two sorted eigenvalue multisets.

    Each gap is divided by ``max(1, |value|)``; ``inf`` when the sizes differ.
    """
    a, b = np.sort(np.asarray(a, float)), np.sort(np.asarray(b, float))
    if a.shape != b.shape:
        return float("inf")
    if a.size == 0:
        return 0.0
    scale = np.maximum(1.0, np.maximum(np.abs(a), np.abs(b)))
    return float(np.max(np.abs(a - b) / scale))
