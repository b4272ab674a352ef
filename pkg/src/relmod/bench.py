"""Timing of the two constructions of the spectrum of ``Delta``.

``pairing`` builds the paired spectral data (two ``n x n`` eigenproblems per
block); ``dense`` builds the ``D x D`` matrix and diagonalizes it.
"""

from __future__ import annotations

import statistics
import time

import numpy as np

from .modular import DENSE_CAP, DenseCapExceeded, build_delta, compare_multisets, dense_eigenvalues
from .sampling import random_pair
from .verify import suite_shapes

VALID_RESIDUAL = 1e-9


def _timed(fn, reps: int):
    times, out = [], None
    for _ in range(reps):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times), out


def bench(dims_list, reps: int, *, seed: int = 0, dense_cap: int = DENSE_CAP) -> dict:
    """Median wall time per (shape, route) and the cross-route eigenvalue residual."""
    if reps < 1:
        raise ValueError("reps must be >= 1")
    shapes = suite_shapes(seed, dims_list)
    for shape in shapes:
        if shape.hilbert_dim > dense_cap:
            raise DenseCapExceeded(
                f"dims {list(shape.block_dims)}: D={shape.hilbert_dim} exceeds dense cap {dense_cap}"
            )
    rows = []
    for i, shape in enumerate(shapes):
        phi, omega = random_pair(np.random.default_rng([seed, i]), shape, "faithful")
        t_pair, ev_pair = _timed(lambda: build_delta(phi, omega).eigenvalues(), reps)
        t_dense, ev_dense = _timed(lambda: dense_eigenvalues(build_delta(phi, omega), dense_cap), reps)
        res = compare_multisets(ev_pair, ev_dense)
        for route, t in (("pairing", t_pair), ("dense", t_dense)):
            rows.append({
                "dims": list(shape.block_dims),
                "hilbert_dim": shape.hilbert_dim,
                "route": route,
                "median_s": t,
                "residual": res,
                "valid": res <= VALID_RESIDUAL,
            })
    warnings = []
    if reps == 1:
        warnings.append("single repetition: medians are single samples with no variance estimate")
    return {"reps": reps, "rows": rows, "warnings": warnings}


def format_table(result: dict) -> str:
    header = f"{'dims':<12} {'D':>5} {'route':<8} {'median_s':>11} {'residual':>10} valid"
    lines = [header, "-" * len(header)]
    for r in result["rows"]:
        dims = ",".join(str(d) for d in r["dims"])
        lines.append(
            f"{dims:<12} {r['hilbert_dim']:>5} {r['route']:<8} {r['median_s']:>11.3e} "
            f"{r['residual']:>10.2e} {'yes' if r['valid'] else 'NO'}"
        )
    lines += [f"warning: {w}" for w in result["warnings"]]
    return "\n".join(lines) + "\n"
