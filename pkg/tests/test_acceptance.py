"""Acceptance criteria, one printed PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py`` (lines appear in the terminal
summary) or directly with ``python tests/test_acceptance.py``.
"""

import json
import math
import subprocess
import sys
import time

import numpy as np

from relmod import entropy as ent
from relmod.algebra import AlgebraShape, Element, State, p_norm, tail_trace, trace
from relmod.gns import GnsVector, operator_matrix
from relmod.modular import (
    build_delta,
    compare_multisets,
    delta_power_apply,
    delta_support,
    dense_eigenvalues,
    dense_oracle,
    dense_support_projection,
    modular_j,
    s_operator_apply,
)
from relmod.sampling import (
    random_element,
    random_pair,
    random_positive,
    random_ranks,
    random_shape,
)

RESULTS: list[str] = []
SEED = 20240611
KINDS = ("faithful", "omega_deficient", "nested")


def report(number: int, title: str, ok: bool, detail: str):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {title}: {detail}"
    RESULTS.append(line)
    print(line)
    assert ok, line


def shapes_basic(rng):
    return [AlgebraShape.single(2), AlgebraShape.single(3), random_shape(rng, (2, 2))]


def np_power(h: Element, s: float) -> Element:
    """Independent power of a positive element via numpy, 0^s = 0."""
    blocks = []
    for b in h.blocks:
        vals, vecs = np.linalg.eigh((b + b.conj().T) / 2)
        cut = 1e-12 * max(1.0, float(np.abs(vals).max()))
        pw = np.where(vals > cut, np.abs(vals) ** s, 0.0)
        blocks.append((vecs * pw) @ vecs.conj().T)
    return Element(h.shape, blocks)


def test_c01_araki_equals_umegaki():
    rng = np.random.default_rng([SEED, 1])
    shapes = shapes_basic(rng)
    t0 = time.perf_counter()
    worst, nonfaithful = 0.0, 0
    for i in range(50):
        phi, omega = random_pair(rng, shapes[i % 3], KINDS[i % 3])
        nonfaithful += not omega.is_faithful()
        a = ent.araki_relative_entropy(phi, omega)
        u = ent.umegaki_information(omega, phi)
        worst = max(worst, abs(a - u) / max(1.0, abs(a)))
    dt = time.perf_counter() - t0
    ok = worst <= 1e-8 and dt < 5 and nonfaithful > 0
    report(1, "S(phi,omega) = I(omega,phi)", ok,
           f"50 pairs ({nonfaithful} non-faithful omega), max scaled gap {worst:.2e} <= 1e-08, {dt:.2f} s < 5 s")


def test_c02_delta_power_formula():
    rng = np.random.default_rng([SEED, 2])
    shapes = shapes_basic(rng)
    t0 = time.perf_counter()
    worst = 0.0
    for i in range(20):
        phi, omega = random_pair(rng, shapes[i % 3], KINDS[i % 3])
        delta = build_delta(phi, omega)
        x = random_element(rng, phi.shape)
        for s in (0.0, 0.1, 0.25, 0.5):
            lhs = delta_power_apply(delta, s, GnsVector(x @ np_power(omega.density, 0.5)))
            rhs = GnsVector(np_power(phi.density, s) @ x @ np_power(omega.density, 0.5 - s))
            worst = max(worst, (lhs - rhs).norm() / (1 + x.op_norm()))
    dt = time.perf_counter() - t0
    report(2, "Delta^s L(x h^1/2) = L(h_phi^s x h_omega^(1/2-s))", worst <= 1e-9 and dt < 2,
           f"20 triples x 4 powers, max ||diff||/(1+||x||) {worst:.2e} <= 1e-09, {dt:.2f} s < 2 s")


def test_c03_pairing_vs_dense():
    rng = np.random.default_rng([SEED, 3])
    shapes = [AlgebraShape.single(n) for n in range(1, 9)] + [random_shape(rng, (3, 3))]
    t0 = time.perf_counter()
    worst = 0.0
    for shape in shapes:
        for kind in KINDS:
            delta = build_delta(*random_pair(rng, shape, kind))
            worst = max(worst, compare_multisets(delta.eigenvalues(), dense_eigenvalues(delta)))
    dt = time.perf_counter() - t0
    report(3, "pairing spectrum = dense superoperator spectrum", worst <= 1e-9 and dt < 10,
           f"dims [1]..[8] and weighted [3,3], max gap {worst:.2e} <= 1e-09, {dt:.2f} s < 10 s")


def double_sum(phi: State, omega: State) -> float:
    """sum_ij beta_j log(beta_j / alpha_i) tau(e_i f_j) from numpy eigendecompositions."""
    total = 0.0
    for wk, hp, ho in zip(phi.shape.weights, phi.density.blocks, omega.density.blocks):
        alpha, ua = np.linalg.eigh(hp)
        beta, vb = np.linalg.eigh(ho)
        overlap = np.abs(ua.conj().T @ vb) ** 2
        for j, bj in enumerate(beta):
            if bj > 1e-14:
                total += wk * float(np.sum(bj * np.log(bj / alpha) * overlap[:, j]))
    return total


def test_c04_worked_example():
    one = AlgebraShape.single(2)
    phi, omega = State(one.diag([0.75, 0.25])), State(one.diag([0.5, 0.5]))
    value = ent.araki_relative_entropy(phi, omega)
    exact = 0.5 * math.log(4 / 3)
    rng = np.random.default_rng([SEED, 4])
    worst = 0.0
    for i in range(10):
        shape = [AlgebraShape.single(2), AlgebraShape.single(3), random_shape(rng, (2, 3))][i % 3]
        phi_r, omega_r = random_pair(rng, shape, "faithful" if i % 2 == 0 else "omega_deficient")
        a = ent.araki_relative_entropy(phi_r, omega_r)
        worst = max(worst, abs(a - double_sum(phi_r, omega_r)) / max(1.0, abs(a)))
    ok = abs(value - exact) <= 1e-12 and worst <= 1e-9
    report(4, "commuting example and double-sum formula", ok,
           f"araki {value:.12f} vs 0.5 ln(4/3) {exact:.12f} (|d| {abs(value - exact):.1e} <= 1e-12); "
           f"10 non-commuting pairs max gap {worst:.2e} <= 1e-09")


def test_c05_quasi_closed_forms():
    rng = np.random.default_rng([SEED, 5])
    shapes = shapes_basic(rng)
    families = [
        ("neg_log", lambda: ent.neg_log()),
        ("power", lambda: ent.power_family(float(rng.uniform(0.05, 1)))),
        ("t_log_t", lambda: ent.t_log_t()),
        ("affine", lambda: ent.affine(float(rng.normal()), float(rng.normal()))),
        ("skew", lambda: ent.skew(float(rng.uniform(0.05, 0.95)))),
    ]
    t0 = time.perf_counter()
    worst = {}
    for name, make in families:
        worst[name] = 0.0
        for i in range(20):
            fam = make()
            phi, omega = random_pair(rng, shapes[i % 3], KINDS[i % 3])
            k = random_element(rng, phi.shape)
            g = ent.quasi_entropy_generic(fam, k, phi, omega)
            c = ent.quasi_entropy_closed(fam, k, phi, omega)
            gap = (0.0 if g == c else math.inf) if math.isinf(g) or math.isinf(c) else abs(g - c) / max(1, abs(g))
            worst[name] = max(worst[name], gap)
    dt = time.perf_counter() - t0
    ok = max(worst.values()) <= 1e-8 and dt < 5
    detail = ", ".join(f"{k} {v:.1e}" for k, v in worst.items())
    report(5, "generic quasi-entropy = closed form", ok, f"20 triples per family, max rel gap: {detail}; {dt:.2f} s < 5 s")


def test_c06_renyi():
    rng = np.random.default_rng([SEED, 6])
    shapes = shapes_basic(rng)
    worst = 0.0
    for i in range(20):
        phi, omega = random_pair(rng, shapes[i % 3], KINDS[i % 3])
        hp, ho = phi.density, omega.density
        for a in (0.0, 0.25, 0.5, 0.75, 0.9):
            scalar = math.log(trace(np_power(hp, 1 - a) @ np_power(ho, a)).real) / (a - 1)
            worst = max(worst, abs(ent.renyi_spectral(omega, phi, a) - scalar) / max(1, abs(scalar)))
    one = AlgebraShape.single(2)
    value = ent.renyi_spectral(State(one.diag([0.5, 0.5])), State(one.diag([0.75, 0.25])), 0.5)
    exact = -2 * math.log(math.sqrt(0.375) + math.sqrt(0.125))
    ok = worst <= 1e-9 and abs(value - exact) <= 1e-12 and abs(value - 0.069335) <= 2e-6
    report(6, "Renyi spectral route = closed trace form", ok,
           f"20 pairs x 5 alphas max gap {worst:.2e} <= 1e-09; commuting alpha=1/2 value {value:.10f} "
           f"(scalar {exact:.10f}, quoted 0.069335)")


def test_c07_trace_commutation():
    rng = np.random.default_rng([SEED, 7])
    worst = worst_mod = 0.0
    for i in range(100):
        shape = random_shape(rng, [(2, 2), (1, 3), (2, 1, 2)][i % 3])
        x, y = random_element(rng, shape), random_element(rng, shape)
        p = float(rng.uniform(1.05, 8))
        q = p / (p - 1)
        lhs, rhs, gap = ent.trace_commutation_check(x, y, p, q)
        worst = max(worst, gap / max(1, abs(lhs)))
        txy, tyx = ent.trace_product_modular(x, y, p)
        worst_mod = max(worst_mod, abs(txy - lhs) / max(1, abs(lhs)), abs(tyx - lhs) / max(1, abs(lhs)))
    ok = worst <= 1e-10 and worst_mod <= 1e-10
    report(7, "tau(xy) = tau(yx) for conjugate exponents", ok,
           f"100 weighted multi-block trials, direct residual {worst:.2e}, modular-route residual {worst_mod:.2e} <= 1e-10")


def test_c08_inequalities():
    rng = np.random.default_rng([SEED, 8])
    slack = 1 + 1e-9
    counts = {"holder": 0, "chebyshev": 0, "estimate_i": 0, "estimate_ii": 0}
    for i in range(100):
        shape = random_shape(rng, [(2,), (3,), (2, 2)][i % 3], weighted=i % 3 == 2)
        x, y = random_element(rng, shape), random_element(rng, shape)
        counts["holder"] += all(
            p_norm(x @ y, r) <= p_norm(x, p) * p_norm(y, q) * slack
            for p, q, r in ((2, 2, 1), (4, 4, 2), (3, 1.5, 1))
        )
        counts["chebyshev"] += all(
            tail_trace(x, e) <= p_norm(x, p) ** p / e ** p * slack
            for e in np.array([0.1, 0.5, 0.9, 1.0]) * x.op_norm()
            for p in (1, 2, 4)
        )
        phi, omega = random_pair(rng, shape, KINDS[i % 3], normalize=False)
        z = random_element(rng, shape)
        n1p, n1o = p_norm(phi.density, 1), p_norm(omega.density, 1)
        s1, s2 = float(rng.uniform(1e-3, 0.25)), float(rng.uniform(0.25, 0.5))

        def lhs(s):
            b = np_power(omega.density, 0.5 - s)
            return trace(b @ z.adjoint() @ np_power(phi.density, 2 * s) @ z @ b).real

        rhs1 = n1p ** (2 * s1) * n1o ** (0.5 - 2 * s1) * z.op_norm() * p_norm(z @ np_power(omega.density, 0.5), 2)
        rhs2 = n1p ** (2 * s2 - 0.5) * n1o ** (1 - 2 * s2) * z.op_norm() * p_norm(np_power(phi.density, 0.5) @ z, 2)
        counts["estimate_i"] += lhs(s1) <= rhs1 * slack
        counts["estimate_ii"] += lhs(s2) <= rhs2 * slack
    ok = all(v == 100 for v in counts.values())
    report(8, "Holder, Chebyshev and both estimate branches", ok,
           ", ".join(f"{k} {v}/100" for k, v in counts.items()) + " with slack 1+1e-9")


def test_c09_modular_structure():
    rng = np.random.default_rng([SEED, 9])
    shapes = shapes_basic(rng)
    j2 = cone_fixed = 0
    polar = support_gap = 0.0
    for i in range(20):
        shape = shapes[i % 3]
        v = GnsVector(random_element(rng, shape))
        j2 += (modular_j(modular_j(v)) - v).norm() == 0
        h = random_positive(rng, shape, random_ranks(rng, shape, deficient=i % 2 == 1))
        cone = GnsVector(State(h).sqrt)
        cone_fixed += (modular_j(cone) - cone).norm() == 0
        phi, omega = random_pair(rng, shape, KINDS[i % 3])
        delta = build_delta(phi, omega)
        x = random_element(rng, shape)
        lhs = modular_j(delta_power_apply(delta, 0.5, GnsVector(x @ omega.sqrt)))
        polar = max(polar, (lhs - s_operator_apply(phi, omega, x)).norm() / max(1, x.op_norm()))
        kind = "violating" if i % 4 == 3 else KINDS[i % 3]
        delta = build_delta(*random_pair(rng, shape, kind))
        ours = operator_matrix(shape, delta_support(delta))
        support_gap = max(support_gap, float(np.max(np.abs(ours - dense_support_projection(dense_oracle(delta))))))
    ok = j2 == 20 and cone_fixed == 20 and polar <= 1e-10 and support_gap <= 1e-9
    report(9, "J^2 = id, J on the cone, S = J Delta^1/2, Delta^0", ok,
           f"J^2 exact {j2}/20, cone fixed exactly {cone_fixed}/20, polar gap {polar:.2e} <= 1e-10, "
           f"support projection gap {support_gap:.2e} <= 1e-09")


def test_c10_verify_suite():
    cmd = [sys.executable, "-m", "relmod.cli", "verify", "--seed", "42", "--no-timestamp"]
    t0 = time.perf_counter()
    first = subprocess.run(cmd, capture_output=True, text=True)
    dt = time.perf_counter() - t0
    second = subprocess.run(cmd, capture_output=True, text=True)
    summary = json.loads(first.stdout)["summary"] if first.stdout else {"failed": -1, "evaluations": 0}
    identical = first.stdout == second.stdout
    ok = first.returncode == 0 and summary["failed"] == 0 and dt < 60 and identical
    report(10, "verify --seed 42", ok,
           f"{summary['evaluations']} evaluations, {summary['failed']} failures, {dt:.1f} s < 60 s, "
           f"rerun byte-identical: {identical}")


if __name__ == "__main__":
    failed = 0
    for name, fn in sorted((k, v) for k, v in dict(globals()).items() if k.startswith("test_c")):
        try:
            fn()
        except AssertionError:
            failed += 1
    sys.exit(1 if failed else 0)
