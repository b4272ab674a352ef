"""Seeded random elements, states and shapes for tests and the verify suite."""

from __future__ import annotations

import numpy as np

from .algebra import AlgebraShape, Element, State, trace


def random_shape(rng: np.random.Generator, dims, weighted: bool = True) -> AlgebraShape:
    """Shape with the given block dims; weights drawn from [0.25, 2] if ``weighted``."""
    dims = tuple(dims)
    if weighted:
        weights = tuple(float(w) for w in rng.uniform(0.25, 2.0, size=len(dims)))
    else:
        weights = (1.0,) * len(dims)
    return AlgebraShape(dims, weights)


def _ginibre(rng, n):
    return (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)


def random_element(rng: np.random.Generator, shape: AlgebraShape, scale: float = 1.0) -> Element:
    return Element(shape, [scale * _ginibre(rng, n) for n in shape.block_dims])


def random_hermitian(rng: np.random.Generator, shape: AlgebraShape) -> Element:
    x = random_element(rng, shape)
    return (x + x.adjoint()) / 2


def random_unitary(rng: np.random.Generator, shape: AlgebraShape) -> Element:
    blocks = []
    for n in shape.block_dims:
        q, r = np.linalg.qr(_ginibre(rng, n))
        blocks.append(q * (np.diag(r) / np.abs(np.diag(r))))
    return Element(shape, blocks)


def random_positive(
    rng: np.random.Generator,
    shape: AlgebraShape,
    ranks=None,
    within: Element | None = None,
) -> Element:
    """Random positive element.

    ``ranks`` caps the rank per block (``None`` means full rank).  With
    ``within`` (a projection) the result is compressed into its range, so the
    support lies under ``within``.
    """
    blocks = []
    for k, n in enumerate(shape.block_dims):
        r = n if ranks is None else int(ranks[k])
        g = (rng.standard_normal((n, r)) + 1j * rng.standard_normal((n, r))) / np.sqrt(2)
        blocks.append(g @ g.conj().T)
    h = Element(shape, blocks)
    if within is not None:
        h = within @ h @ within
    return (h + h.adjoint()) / 2


def random_density(rng, shape, ranks=None, within=None, normalize: bool = True) -> Element:
    h = random_positive(rng, shape, ranks, within)
    if normalize:
        h = h / trace(h).real
    return h


def random_state(rng, shape, ranks=None, within=None, normalize: bool = True, **kw) -> State:
    return State(random_density(rng, shape, ranks, within, normalize), **kw)


def random_ranks(rng: np.random.Generator, shape: AlgebraShape, deficient: bool = True):
    """Per-block ranks; with ``deficient`` at least one block loses rank when possible."""
    ranks = [n for n in shape.block_dims]
    if deficient:
        candidates = [k for k, n in enumerate(shape.block_dims) if n > 1]
        if candidates:
            k = candidates[int(rng.integers(len(candidates)))]
            ranks[k] = int(rng.integers(1, shape.block_dims[k]))
        else:
            # every block is 1x1: kill one block entirely if more than one exists
            if shape.num_blocks > 1:
                ranks[int(rng.integers(shape.num_blocks))] = 0
    return ranks


def random_pair(
    rng: np.random.Generator,
    shape: AlgebraShape,
    kind: str = "faithful",
    normalize: bool = True,
) -> tuple[State, State]:
    """Random ``(phi, omega)``.

    ``kind``: ``"faithful"`` (both faithful), ``"omega_deficient"`` (omega
    rank-deficient inside a faithful phi), ``"nested"`` (phi deficient, omega
    supported inside it), ``"violating"`` (omega not under phi).
    """
    if kind == "faithful":
        return random_state(rng, shape, normalize=normalize), random_state(rng, shape, normalize=normalize)
    if kind == "omega_deficient":
        phi = random_state(rng, shape, normalize=normalize)
        omega = random_state(rng, shape, ranks=random_ranks(rng, shape), normalize=normalize)
        return phi, omega
    if kind == "nested":
        phi = random_state(rng, shape, ranks=random_ranks(rng, shape), normalize=normalize)
        omega = random_state(rng, shape, within=phi.support, normalize=normalize)
        return phi, omega
    if kind == "violating":
        phi = random_state(rng, shape, ranks=random_ranks(rng, shape), normalize=normalize)
        omega = random_state(rng, shape, normalize=normalize)
        return phi, omega
    raise ValueError(f"unknown pair kind {kind!r}")
