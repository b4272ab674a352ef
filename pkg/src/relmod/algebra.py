"""Finite direct sums of matrix algebras with a weighted trace.

The algebra ``M = M_{n_1} + ... + M_{n_K}`` carries the faithful trace
``tau(x) = sum_k w_k tr(x_k)``.  Every element is bounded, so the spaces
``L^p(M, tau)`` all coincide with ``M`` as sets and differ only in norm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Sequence

import numpy as np

GROUP_TOL = 1e-10
SUPPORT_ETA = 1e-12
HERMITIAN_TOL = 1e-10


class ShapeMismatchError(ValueError):
    pass


class NotHermitianError(ValueError):
    pass


class NotPositiveError(ValueError):
    pass


@dataclass(frozen=True)
class AlgebraShape:
    """Block dimensions ``n_k`` and trace weights ``w_k`` of the algebra."""

    block_dims: tuple[int, ...]
    weights: tuple[float, ...]

    def __post_init__(self):
        dims = tuple(int(n) for n in self.block_dims)
        weights = tuple(float(w) for w in self.weights)
        if len(dims) == 0:
            raise ValueError("an algebra needs at least one block")
        if len(dims) != len(weights):
            raise ValueError(
                f"{len(dims)} block dimensions but {len(weights)} weights"
            )
        if any(n < 1 for n in dims):
            raise ValueError(f"block dimensions must be >= 1, got {dims}")
        if any(not math.isfinite(w) or w <= 0 for w in weights):
            raise ValueError(
                f"trace weights must be finite and > 0 (faithful trace), got {weights}"
            )
        object.__setattr__(self, "block_dims", dims)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def single(cls, n: int) -> AlgebraShape:
        return cls((n,), (1.0,))

    @property
    def num_blocks(self) -> int:
        return len(self.block_dims)

    @property
    def hilbert_dim(self) -> int:
        """Dimension of the GNS space ``L^2(M, tau)``."""
        return sum(n * n for n in self.block_dims)

    def identity(self) -> Element:
        return Element(self, [np.eye(n, dtype=complex) for n in self.block_dims])

    def zeros(self) -> Element:
        return Element(self, [np.zeros((n, n), dtype=complex) for n in self.block_dims])

    def diag(self, values: Sequence[float]) -> Element:
        """Diagonal element from the concatenated block diagonals."""
        values = np.asarray(values, dtype=complex)
        if values.shape != (sum(self.block_dims),):
            raise ShapeMismatchError(
                f"expected {sum(self.block_dims)} diagonal entries, got {values.shape}"
            )
        blocks, start = [], 0
        for n in self.block_dims:
            blocks.append(np.diag(values[start:start + n]))
            start += n
        return Element(self, blocks)


class Element:
    """Block-diagonal complex matrix: a member of ``M`` or a GNS carrier."""

    __slots__ = ("shape", "blocks")

    def __init__(self, shape: AlgebraShape, blocks: Sequence[np.ndarray]):
        blocks = tuple(np.array(b, dtype=complex) for b in blocks)
        if len(blocks) != shape.num_blocks:
            raise ShapeMismatchError(
                f"shape declares {shape.num_blocks} blocks, got {len(blocks)}"
            )
        for k, (b, n) in enumerate(zip(blocks, shape.block_dims)):
            if b.shape != (n, n):
                raise ShapeMismatchError(f"block {k} has shape {b.shape}, expected ({n}, {n})")
            if not np.all(np.isfinite(b)):
                raise ValueError(f"block {k} has non-finite entries")
            b.setflags(write=False)
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "blocks", blocks)

    def __setattr__(self, name, value):
        raise AttributeError("Element is immutable")

    def __repr__(self):
        return f"Element(dims={self.shape.block_dims}, weights={self.shape.weights})"

    def _check(self, other: Element):
        if not isinstance(other, Element):
            return NotImplemented
        if other.shape != self.shape:
            raise ShapeMismatchError(f"{self.shape} vs {other.shape}")
        return None

    def __add__(self, other):
        if (r := self._check(other)) is NotImplemented:
            return r
        return Element(self.shape, [a + b for a, b in zip(self.blocks, other.blocks)])

    def __sub__(self, other):
        if (r := self._check(other)) is NotImplemented:
            return r
        return Element(self.shape, [a - b for a, b in zip(self.blocks, other.blocks)])

    def __neg__(self):
        return Element(self.shape, [-a for a in self.blocks])

    def __mul__(self, c):
        if isinstance(c, Element):
            return NotImplemented
        return Element(self.shape, [c * a for a in self.blocks])

    __rmul__ = __mul__

    def __truediv__(self, c):
        return Element(self.shape, [a / c for a in self.blocks])

    def __matmul__(self, other):
        if (r := self._check(other)) is NotImplemented:
            return r
        return Element(self.shape, [a @ b for a, b in zip(self.blocks, other.blocks)])

    def adjoint(self) -> Element:
        return Element(self.shape, [a.conj().T for a in self.blocks])

    @property
    def H(self) -> Element:
        return self.adjoint()

    def op_norm(self) -> float:
        """Operator norm: largest singular value over all blocks."""
        return max(float(np.linalg.norm(b, 2)) for b in self.blocks)

    def hermitian_residual(self) -> float:
        return max(float(np.linalg.norm(b - b.conj().T, 2)) for b in self.blocks)

    def is_hermitian(self, tol: float = HERMITIAN_TOL) -> bool:
        return self.hermitian_residual() <= tol * max(1.0, self.op_norm())

    def to_dense(self) -> np.ndarray:
        """Block-diagonal dense matrix (weights are not applied)."""
        n = sum(self.shape.block_dims)
        out = np.zeros((n, n), dtype=complex)
        start = 0
        for b in self.blocks:
            m = b.shape[0]
            out[start:start + m, start:start + m] = b
            start += m
        return out


def distance(x: Element, y: Element) -> float:
    """Operator-norm distance ``||x - y||_inf``."""
    return (x - y).op_norm()


def trace(x: Element) -> complex:
    """Weighted trace ``sum_k w_k tr(x_k)``."""
    return complex(sum(w * np.trace(b) for w, b in zip(x.shape.weights, x.blocks)))


def singular_values(x: Element) -> list[np.ndarray]:
    return [np.linalg.svd(b, compute_uv=False) for b in x.blocks]


def p_norm(x: Element, p: float) -> float:
    """Noncommutative L^p norm ``tau(|x|^p)^(1/p)``; ``p = inf`` is the operator norm."""
    if p == math.inf:
        return x.op_norm()
    if not p >= 1:
        raise ValueError(f"p must be >= 1 or inf, got {p}")
    total = sum(
        w * float(np.sum(s ** p)) for w, s in zip(x.shape.weights, singular_values(x))
    )
    return total ** (1.0 / p)


def _hermitian_blocks(x: Element, tol: float) -> list[np.ndarray]:
    if not x.is_hermitian(tol):
        raise NotHermitianError(
            f"element is not Hermitian: ||x - x*|| = {x.hermitian_residual():.3e}"
        )
    return [(b + b.conj().T) / 2 for b in x.blocks]


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Distinct eigenvalues with their spectral projections.

    ``bases[k]`` holds the eigenvectors of block ``k`` as columns together
    with the index of the eigenvalue group each column belongs to, so that
    functions of the element can be applied without rebuilding projections.
    """

    eigenvalues: np.ndarray
    projections: tuple[Element, ...]
    bases: tuple[tuple[np.ndarray, np.ndarray], ...]
    shape: AlgebraShape

    def __len__(self):
        return len(self.eigenvalues)

    def ranks(self) -> np.ndarray:
        """Array ``[group, block]`` of projection ranks."""
        r = np.zeros((len(self.eigenvalues), self.shape.num_blocks), dtype=int)
        for k, (_, labels) in enumerate(self.bases):
            np.add.at(r[:, k], labels, 1)
        return r

    def reconstruct(self) -> Element:
        return self.assemble(self.eigenvalues)

    def assemble(self, values: Sequence[complex]) -> Element:
        """``sum_i values[i] e_i``."""
        values = np.asarray(values)
        real = not np.iscomplexobj(values)
        blocks = []
        for vecs, labels in self.bases:
            b = (vecs * values[labels]) @ vecs.conj().T
            # real values give an exactly Hermitian result
            blocks.append((b + b.conj().T) / 2 if real else b)
        return Element(self.shape, blocks)

    def map(self, f: Callable[[float], float]) -> SpectralDecomposition:
        """Relabel eigenvalues through an injective ``f`` and re-sort."""
        new = np.array([f(lam) for lam in self.eigenvalues], dtype=float)
        order = np.argsort(new, kind="stable")
        if np.any(np.diff(new[order]) == 0):
            raise ValueError("map merged distinct eigenvalues")
        inverse = np.empty_like(order)
        inverse[order] = np.arange(len(order))
        bases = tuple((vecs, inverse[labels]) for vecs, labels in self.bases)
        projections = tuple(self.projections[i] for i in order)
        return SpectralDecomposition(new[order], projections, bases, self.shape)


def spectral_decompose(
    x: Element,
    group_tol: float = GROUP_TOL,
    *,
    hermitian_tol: float = HERMITIAN_TOL,
    zero_eta: float | None = None,
) -> SpectralDecomposition:
    """Eigendecomposition of a Hermitian element with degeneracy grouping.

    Eigenvalues within ``group_tol * max(1, max|lambda|)`` of their sorted
    neighbour share a group.  With ``zero_eta`` set, eigenvalues of modulus at
    most ``zero_eta * max(1, ||x||)`` are first snapped to exactly zero.
    """
    blocks = _hermitian_blocks(x, hermitian_tol)
    per_block = [np.linalg.eigh(b) for b in blocks]
    all_vals = np.concatenate([vals for vals, _ in per_block])
    scale = max(1.0, float(np.max(np.abs(all_vals))) if all_vals.size else 0.0)
    if zero_eta is not None:
        all_vals = np.where(np.abs(all_vals) <= zero_eta * scale, 0.0, all_vals)

    order = np.argsort(all_vals, kind="stable")
    sorted_vals = all_vals[order]
    group_of_sorted = np.zeros(len(sorted_vals), dtype=int)
    for i in range(1, len(sorted_vals)):
        gap = sorted_vals[i] - sorted_vals[i - 1]
        group_of_sorted[i] = group_of_sorted[i - 1] + (gap > group_tol * scale)
    labels_flat = np.empty(len(all_vals), dtype=int)
    labels_flat[order] = group_of_sorted
    num_groups = int(group_of_sorted[-1]) + 1

    eigenvalues = np.zeros(num_groups)
    for g in range(num_groups):
        members = sorted_vals[group_of_sorted == g]
        # keep an exact zero exact
        eigenvalues[g] = 0.0 if np.any(members == 0.0) and zero_eta is not None else members.mean()

    bases, start = [], 0
    for vals, vecs in per_block:
        m = len(vals)
        bases.append((vecs, labels_flat[start:start + m]))
        start += m
    bases = tuple(bases)

    projections = []
    for g in range(num_groups):
        proj_blocks = []
        for vecs, labels in bases:
            v = vecs[:, labels == g]
            proj_blocks.append(v @ v.conj().T)
        projections.append(Element(x.shape, proj_blocks))
    return SpectralDecomposition(eigenvalues, tuple(projections), bases, x.shape)


def positive_spectrum(
    h: Element,
    *,
    group_tol: float = GROUP_TOL,
    eta: float = SUPPORT_ETA,
    tol: float = HERMITIAN_TOL,
) -> SpectralDecomposition:
    """Spectral decomposition of a positive element with the kernel snapped to 0.

    Raises ``NotPositiveError`` when an eigenvalue is below
    ``-tol * max(1, ||h||)``; smaller negative round-off is clipped to zero.
    """
    spec = spectral_decompose(h, group_tol, hermitian_tol=tol)
    scale = max(1.0, float(np.max(np.abs(spec.eigenvalues))))
    lowest = float(spec.eigenvalues[0])
    if lowest < -tol * scale:
        raise NotPositiveError(f"element has negative eigenvalue {lowest:.6g}")
    # tolerated negative round-off must land on the snapped kernel
    zero_eta = max(eta, tol) if lowest < 0 else eta
    return spectral_decompose(h, group_tol, hermitian_tol=tol, zero_eta=zero_eta)


def func_calc(
    x: Element,
    f: Callable[[float], float],
    zero_convention: float | None = None,
    *,
    group_tol: float = GROUP_TOL,
    eta: float = SUPPORT_ETA,
    spectrum: SpectralDecomposition | None = None,
) -> Element:
    """Apply a real function to a Hermitian element through its spectrum.

    When ``zero_convention`` is given, eigenvalues at most
    ``eta * max(1, ||x||)`` in modulus count as zero and are mapped to
    ``zero_convention`` instead of ``f(0)``.
    """
    if spectrum is None:
        zero_eta = eta if zero_convention is not None else None
        spectrum = spectral_decompose(x, group_tol, zero_eta=zero_eta)
    values = []
    with np.errstate(all="ignore"):
        for lam in spectrum.eigenvalues:
            if zero_convention is not None and lam == 0.0:
                values.append(float(zero_convention))
                continue
            v = float(f(float(lam)))
            if not math.isfinite(v):
                raise ValueError(f"function is not finite at eigenvalue {lam:.6g}")
            values.append(v)
    return spectrum.assemble(values)


def w(lam: float) -> float:
    """``1/lam`` off zero, ``0`` at zero."""
    return 0.0 if lam == 0.0 else 1.0 / lam


def support(x: Element, *, eta: float = SUPPORT_ETA, tol: float = HERMITIAN_TOL) -> Element:
    """Range projection of a positive element."""
    spec = positive_spectrum(x, eta=eta, tol=tol)
    return spec.assemble((spec.eigenvalues > 0).astype(float))


def w_transform(h: Element, *, eta: float = SUPPORT_ETA, tol: float = HERMITIAN_TOL) -> Element:
    """Spectral pseudo-inverse ``w(h)``: ``w(h) h = h w(h) = s(h)``."""
    spec = positive_spectrum(h, eta=eta, tol=tol)
    return spec.assemble([w(lam) for lam in spec.eigenvalues])


def positive_power(spec: SpectralDecomposition, s: float) -> Element:
    """``h^s`` from a snapped positive spectrum.

    ``s = 0`` gives the support, negative ``s`` uses powers of ``w(h)``.
    """
    lams = spec.eigenvalues
    if s == 0:
        vals = (lams > 0).astype(float)
    elif s > 0:
        vals = np.where(lams > 0, np.abs(lams) ** s, 0.0)
    else:
        with np.errstate(divide="ignore"):
            vals = np.where(lams > 0, np.abs(lams) ** s, 0.0)
    return spec.assemble(vals)


def power(h: Element, s: float, **kw) -> Element:
    return positive_power(positive_spectrum(h, **kw), s)


def truncate(x: Element, n: float, *, group_tol: float = GROUP_TOL) -> Element:
    """Spectral truncation ``x_[n]``: drop the parts with ``|lambda| > n``."""
    if not n > 0:
        raise ValueError(f"truncation level must be > 0, got {n}")
    spec = spectral_decompose(x, group_tol)
    # eigenvalues within the grouping tolerance of n count as |lambda| <= n
    keep = np.abs(spec.eigenvalues) <= n + group_tol * max(1.0, n)
    return spec.assemble(np.where(keep, spec.eigenvalues, 0.0))


def abs_element(x: Element) -> Element:
    """``|x| = (x* x)^(1/2)`` via the singular value decomposition."""
    blocks = []
    for b in x.blocks:
        _, s, vh = np.linalg.svd(b)
        blocks.append((vh.conj().T * s) @ vh)
    return Element(x.shape, blocks)


def tail_trace(x: Element, eps: float) -> float:
    """``tau(e([eps, inf)))`` for the spectral measure ``e`` of ``|x|``."""
    if not eps > 0:
        raise ValueError(f"eps must be > 0, got {eps}")
    return float(
        sum(w * np.count_nonzero(s >= eps) for w, s in zip(x.shape.weights, singular_values(x)))
    )


class State:
    """A positive functional ``rho(x) = tau(x h)`` given by its density ``h``.

    States are not normalised; ``mass`` is ``tau(h)``.  The density is
    symmetrised on construction and its kernel is read off a snapped
    spectrum, so ``support @ density`` reproduces ``density``.
    """

    def __init__(
        self,
        density: Element,
        *,
        tol: float = HERMITIAN_TOL,
        eta: float = SUPPORT_ETA,
        group_tol: float = GROUP_TOL,
    ):
        self.tol, self.eta, self.group_tol = tol, eta, group_tol
        self.spectrum = positive_spectrum(density, group_tol=group_tol, eta=eta, tol=tol)
        # rebuilt from the snapped spectrum so that every power agrees with it
        self.density = self.spectrum.reconstruct()
        self.mass = trace(self.density).real
        if not (self.mass > 0 and math.isfinite(self.mass)):
            raise NotPositiveError(f"state must have positive finite mass, got {self.mass:.6g}")

    @classmethod
    def from_spectrum(
        cls,
        spectrum: SpectralDecomposition,
        *,
        tol: float = HERMITIAN_TOL,
        eta: float = SUPPORT_ETA,
        group_tol: float = GROUP_TOL,
    ) -> State:
        """State with a known nonnegative spectrum, skipping a second eigendecomposition.

        Keeps small eigenvalues at full relative precision, e.g. for ``x^p``
        built as ``spec.map(lambda t: t ** p)``.
        """
        if spectrum.eigenvalues.size and spectrum.eigenvalues[0] < 0:
            raise NotPositiveError("spectrum has a negative eigenvalue")
        self = cls.__new__(cls)
        self.tol, self.eta, self.group_tol = tol, eta, group_tol
        self.spectrum = spectrum
        self.density = spectrum.reconstruct()
        self.mass = trace(self.density).real
        if not (self.mass > 0 and math.isfinite(self.mass)):
            raise NotPositiveError(f"state must have positive finite mass, got {self.mass:.6g}")
        return self

    def __repr__(self):
        return f"State(dims={self.shape.block_dims}, mass={self.mass:.6g})"

    @property
    def shape(self) -> AlgebraShape:
        return self.density.shape

    @cached_property
    def support(self) -> Element:
        return positive_power(self.spectrum, 0)

    @cached_property
    def sqrt(self) -> Element:
        return positive_power(self.spectrum, 0.5)

    @cached_property
    def log(self) -> Element:
        """``log h`` with the kernel mapped to 0."""
        lams = self.spectrum.eigenvalues
        with np.errstate(divide="ignore"):
            return self.spectrum.assemble(np.where(lams > 0, np.log(np.where(lams > 0, lams, 1.0)), 0.0))

    def power(self, s: float) -> Element:
        if s == 0.5:
            return self.sqrt
        return positive_power(self.spectrum, s)

    def is_faithful(self) -> bool:
        return bool(self.spectrum.eigenvalues[0] > 0)

    def __call__(self, x: Element) -> complex:
        """``rho(x) = tau(h x)``."""
        return trace(self.density @ x)

    def normalized(self) -> State:
        return State(self.density / self.mass, tol=self.tol, eta=self.eta, group_tol=self.group_tol)


def support_leq(p: Element, q: Element, tol: float = 1e-8) -> bool:
    """Whether projection ``p`` lies under projection ``q``."""
    return ((q.shape.identity() - q) @ p).op_norm() <= tol
