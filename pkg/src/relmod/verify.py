"""Seeded invariant suite covering every module.

Each check draws its own generator from ``(seed, check index, shape index,
trial)``, so results do not depend on evaluation order.  A check returns one
residual per trial; the trial passes when the residual is at most the
check's bound.  Checks that need a dense ``D x D`` oracle are skipped, and
counted as skipped, when ``D`` exceeds the cap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import entropy as ent
from .algebra import (
    AlgebraShape,
    Element,
    State,
    abs_element,
    func_calc,
    p_norm,
    positive_power,
    positive_spectrum,
    spectral_decompose,
    support,
    tail_trace,
    trace,
    truncate,
    w_transform,
)
from .gns import (
    GnsVector,
    apply_left,
    apply_right,
    coordinates,
    expectation,
    from_coordinates,
    inner,
    left_matrix,
    right_matrix,
    vector_support_left,
    vector_support_right,
)
from .modular import (
    DENSE_CAP,
    build_delta,
    compare_multisets,
    delta_power_apply,
    delta_support,
    dense_eigenvalues,
    dense_oracle,
    dense_power,
    dense_support_projection,
    modular_j,
    s_operator_apply,
)
from .sampling import (
    random_element,
    random_hermitian,
    random_pair,
    random_positive,
    random_ranks,
    random_shape,
    random_state,
    random_unitary,
)

PAIR_KINDS = ("faithful", "omega_deficient", "nested")
S_GRID = (0.0, 0.1, 0.25, 0.5)
ALPHA_GRID = ent.DEFAULT_ALPHAS
HOLDER_TRIPLES = ((2.0, 2.0, 1.0), (4.0, 4.0, 2.0), (3.0, 1.5, 1.0))


@dataclass(frozen=True)
class Check:
    name: str
    bound: float
    fn: Callable[[np.random.Generator, AlgebraShape, int], float]
    oracle: bool = False

    @property
    def module(self) -> str:
        return self.name.split(".", 1)[0]


CHECKS: list[Check] = []


def check(name: str, bound: float, oracle: bool = False):
    def register(fn):
        CHECKS.append(Check(name, bound, fn, oracle))
        return fn

    return register


def _rel(a, b) -> float:
    if isinstance(a, float) and isinstance(b, float) and (math.isinf(a) or math.isinf(b)):
        return 0.0 if a == b else math.inf
    return float(abs(a - b) / max(1.0, abs(a), abs(b)))


def _excess(lhs: float, rhs: float) -> float:
    """Relative amount by which ``lhs <= rhs`` fails; 0 when it holds."""
    return max(0.0, (lhs - rhs) / max(abs(rhs), np.finfo(float).tiny))


def _kind(trial: int) -> str:
    return PAIR_KINDS[trial % len(PAIR_KINDS)]


def _unit(x: Element) -> Element:
    return x / x.op_norm()


# --- algebra -----------------------------------------------------------------


@check("algebra.trace_entrywise", 1e-12)
def _trace_entrywise(rng, shape, trial):
    x = random_hermitian(rng, shape)
    oracle = 0.0
    for wk, blk in zip(shape.weights, x.blocks):
        for i in range(blk.shape[0]):
            oracle += wk * blk[i, i]
    t = trace(x)
    return abs(t - oracle) / max(1.0, abs(oracle)) + abs(t.imag)


@check("algebra.traciality", 1e-10)
def _traciality(rng, shape, trial):
    x, y = random_element(rng, shape), random_element(rng, shape)
    return _rel(trace(x @ y), trace(y @ x))


@check("algebra.faithfulness", 1e-12)
def _faithfulness(rng, shape, trial):
    x = _unit(random_element(rng, shape))
    c = min(shape.weights)
    zero = abs(trace(shape.zeros().adjoint() @ shape.zeros()))
    return _excess(c, trace(x.adjoint() @ x).real) + zero


@check("algebra.spectral_reconstruction", 1e-10)
def _spectral_reconstruction(rng, shape, trial):
    x = random_hermitian(rng, shape)
    spec = spectral_decompose(x)
    scale = max(1.0, x.op_norm())
    res = (spec.reconstruct() - x).op_norm() / scale
    projs = spec.projections
    for i, e in enumerate(projs):
        for j, f in enumerate(projs):
            target = e if i == j else shape.zeros()
            res = max(res, (e @ f - target).op_norm())
    total = shape.zeros()
    for e in projs:
        total = total + e
    return max(res, (total - shape.identity()).op_norm())


@check("algebra.func_calc_square", 1e-10)
def _func_calc_square(rng, shape, trial):
    x = random_hermitian(rng, shape)
    return (func_calc(x, lambda t: t * t) - x @ x).op_norm() / max(1.0, x.op_norm() ** 2)


@check("algebra.p_norm_oracle", 1e-10)
def _p_norm_oracle(rng, shape, trial):
    x = random_element(rng, shape)
    res = 0.0
    for p in (1.0, 1.5, 2.0, 3.0, math.inf):
        # singular values from the eigenvalues of x* x
        sv = [np.sqrt(np.clip(np.linalg.eigvalsh(b.conj().T @ b), 0, None)) for b in x.blocks]
        if p == math.inf:
            oracle = max(float(s.max()) for s in sv)
        else:
            oracle = sum(wk * float(np.sum(s ** p)) for wk, s in zip(shape.weights, sv)) ** (1 / p)
        res = max(res, _rel(p_norm(x, p), oracle))
    return res


@check("algebra.holder", 1e-9)
def _holder(rng, shape, trial):
    x, y = random_element(rng, shape), random_element(rng, shape)
    res = 0.0
    for p, q, r in HOLDER_TRIPLES:
        res = max(res, _excess(p_norm(x @ y, r), p_norm(x, p) * p_norm(y, q)))
    return res


@check("algebra.chebyshev", 1e-9)
def _chebyshev(rng, shape, trial):
    x = random_element(rng, shape)
    top = x.op_norm()
    res = 0.0
    for eps in (0.1 * top, 0.5 * top, 0.9 * top, top, 1.5 * top):
        for p in (1.0, 2.0, 4.0):
            res = max(res, _excess(tail_trace(x, eps), p_norm(x, p) ** p / eps ** p))
    return res


@check("algebra.tail_convergence", 0.0)
def _tail_convergence(rng, shape, trial):
    """Geometric sequence x_n = x + r^n z: the tail trace of x_n - x reaches 0."""
    x, z = random_element(rng, shape), random_element(rng, shape)
    r = float(rng.uniform(0.3, 0.8))
    eps = float(rng.uniform(0.01, 0.2))
    tails = []
    for n in range(60):
        xn = x + (r ** n) * z
        tails.append(tail_trace(xn - x, eps))
    increasing = any(b > a for a, b in zip(tails, tails[1:]))
    return float(increasing) + tails[-1]


@check("algebra.w_transform", 1e-9)
def _w_transform(rng, shape, trial):
    ranks = random_ranks(rng, shape, deficient=trial % 2 == 1)
    h = random_positive(rng, shape, ranks)
    ht = w_transform(h)
    s = support(h)
    scale = max(1.0, h.op_norm())
    res = (h @ ht - s).op_norm()
    res = max(res, (ht @ h - s).op_norm())
    res = max(res, (w_transform(ht) - h).op_norm() / scale)
    return max(res, (s @ h - h).op_norm() / scale)


@check("algebra.truncation", 1e-12)
def _truncation(rng, shape, trial):
    x = random_hermitian(rng, shape)
    top = x.op_norm()
    errs = [p_norm(x - truncate(x, n), 2) for n in np.linspace(0.05 * top, top, 12)]
    res = max(0.0, *(b - a for a, b in zip(errs, errs[1:])))
    return res + errs[-1] / max(1.0, top)


# --- gns -------------------------------------------------------------------------


@check("gns.inner_product", 1e-12)
def _inner_product(rng, shape, trial):
    a, b = GnsVector(random_element(rng, shape)), GnsVector(random_element(rng, shape))
    res = _rel(inner(a, b), np.conj(inner(b, a)))
    res = max(res, _rel(inner(a, a).real, p_norm(a.carrier, 2) ** 2) + abs(inner(a, a).imag))
    return res + (0.0 if inner(a, a).real > 0 else 1.0)


@check("gns.orthogonal_pieces", 1e-12)
def _orthogonal_pieces(rng, shape, trial):
    phi, omega = random_pair(rng, shape, "faithful")
    es = spectral_decompose(random_hermitian(rng, shape)).projections
    fs = spectral_decompose(random_hermitian(rng, shape)).projections
    a, b = random_element(rng, shape), random_element(rng, shape)
    scale = max(1.0, p_norm(a, 2) * p_norm(b, 2))
    res = 0.0
    for i, e in enumerate(es):
        for j, f in enumerate(fs):
            for k, e2 in enumerate(es):
                for l_, f2 in enumerate(fs):
                    if (i, j) == (k, l_):
                        continue
                    res = max(res, abs(inner(GnsVector(e @ a @ f), GnsVector(e2 @ b @ f2))) / scale)
    return res


@check("gns.vector_state", 1e-10)
def _vector_state(rng, shape, trial):
    rho = random_state(rng, shape, ranks=random_ranks(rng, shape, deficient=trial % 2 == 1))
    x = random_element(rng, shape)
    xi = GnsVector(rho.sqrt)
    target = rho(x)
    left = inner(xi, apply_left(x, xi))
    right = inner(xi, apply_right(x, xi))
    return max(_rel(left, target), _rel(right, target))


@check("gns.representation_laws", 1e-10)
def _representation_laws(rng, shape, trial):
    x, y, a, b = (random_element(rng, shape) for _ in range(4))
    va, vb = GnsVector(a), GnsVector(b)
    scale = max(1.0, x.op_norm() * y.op_norm() * p_norm(a, 2))
    res = (apply_left(x @ y, va) - apply_left(x, apply_left(y, va))).norm() / scale
    res = max(res, (apply_right(x @ y, va) - apply_right(y, apply_right(x, va))).norm() / scale)
    res = max(res, (apply_left(x, apply_right(y, va)) - apply_right(y, apply_left(x, va))).norm() / scale)
    res = max(res, _rel(inner(va, apply_left(x, vb)), inner(apply_left(x.adjoint(), va), vb)))
    return res


@check("gns.isometry", 1e-10)
def _isometry(rng, shape, trial):
    x, a = random_element(rng, shape), random_element(rng, shape)
    lhs = apply_left(x, GnsVector(a)).norm() ** 2
    return _rel(lhs, trace(a.adjoint() @ x.adjoint() @ x @ a).real)


@check("gns.commutant_dense", 1e-10, oracle=True)
def _commutant_dense(rng, shape, trial):
    x, y = random_element(rng, shape), random_element(rng, shape)
    lx, ry = left_matrix(x), right_matrix(y)
    return float(np.max(np.abs(lx @ ry - ry @ lx))) / max(1.0, x.op_norm() * y.op_norm())


@check("gns.functional_calculus_dense", 1e-10, oracle=True)
def _functional_calculus_dense(rng, shape, trial):
    x = random_hermitian(rng, shape)
    a = GnsVector(random_element(rng, shape))
    lx = left_matrix(x)
    lhs = coordinates(apply_left(func_calc(x, lambda t: t * t), a))
    rhs = lx @ lx @ coordinates(a)
    res = float(np.linalg.norm(lhs - rhs)) / max(1.0, x.op_norm() ** 2 * a.norm())
    # exp goes through the dense eigendecomposition of pi(x)
    vals, vecs = np.linalg.eigh(lx)
    rhs = (vecs * np.exp(vals)) @ vecs.conj().T @ coordinates(a)
    lhs = coordinates(apply_left(func_calc(x, np.exp), a))
    return max(res, float(np.linalg.norm(lhs - rhs)) / max(1.0, math.exp(x.op_norm()) * a.norm()))


@check("gns.expectation_routes", 1e-10)
def _expectation_routes(rng, shape, trial):
    rho = random_state(rng, shape)
    x = random_hermitian(rng, shape)
    sym = expectation(rho, x, "symmetric")
    res = max(_rel(sym, expectation(rho, x, "spectral")), _rel(sym, expectation(rho, x, "product")))
    pos = expectation(rho, abs_element(x))
    return res + (0.0 if pos >= 0 else 1.0)


@check("gns.vector_supports", 1e-10)
def _vector_supports(rng, shape, trial):
    h = random_positive(rng, shape, random_ranks(rng, shape))
    v = GnsVector(positive_power(positive_spectrum(h), 0.5))
    sl, sr = vector_support_left(v), vector_support_right(v)
    scale = max(1.0, v.norm())
    return max(
        (apply_left(sl, v) - v).norm() / scale,
        (apply_right(sr, v) - v).norm() / scale,
        (sl - support(h)).op_norm(),
    )


# --- modular --------------------------------------------------------------------


@check("modular.pairing_vs_dense", 1e-9, oracle=True)
def _pairing_vs_dense(rng, shape, trial):
    phi, omega = random_pair(rng, shape, _kind(trial))
    delta = build_delta(phi, omega)
    return compare_multisets(delta.eigenvalues(), dense_eigenvalues(delta))


@check("modular.dense_positive_hermitian", 1e-10, oracle=True)
def _dense_positive_hermitian(rng, shape, trial):
    phi, omega = random_pair(rng, shape, _kind(trial))
    m = dense_oracle(build_delta(phi, omega))
    scale = max(1.0, float(np.max(np.abs(m))))
    herm = float(np.max(np.abs(m - m.conj().T))) / scale
    lowest = float(np.linalg.eigvalsh((m + m.conj().T) / 2).min()) / scale
    return herm + max(0.0, -lowest)


@check("modular.basic_xi", 1e-9)
def _basic_xi(rng, shape, trial):
    phi, omega = random_pair(rng, shape, _kind(trial))
    delta = build_delta(phi, omega)
    xi = GnsVector(omega.sqrt)
    res = 0.0
    for s in S_GRID:
        rhs = GnsVector(phi.power(s) @ omega.power(0.5 - s))
        res = max(res, (delta_power_apply(delta, s, xi) - rhs).norm())
    return res


@check("modular.basic_x", 1e-9)
def _basic_x(rng, shape, trial):
    phi, omega = random_pair(rng, shape, _kind(trial))
    delta = build_delta(phi, omega)
    x = random_element(rng, shape)
    v = GnsVector(x @ omega.sqrt)
    res = 0.0
    for s in S_GRID:
        rhs = GnsVector(phi.power(s) @ x @ omega.power(0.5 - s))
        res = max(res, (delta_power_apply(delta, s, v) - rhs).norm() / (1 + x.op_norm()))
    return res


@check("modular.power_law", 1e-9)
def _power_law(rng, shape, trial):
    phi, omega = random_pair(rng, shape, _kind(trial))
    delta = build_delta(phi, omega)
    v = delta_support(delta)(GnsVector(random_element(rng, shape)))
    s, t = float(rng.uniform(0, 1)), float(rng.uniform(0, 1))
    lhs = delta_power_apply(delta, s + t, v)
    rhs = delta_power_apply(delta, s, delta_power_apply(delta, t, v))
    return (lhs - rhs).norm() / max(1.0, lhs.norm())


@check("modular.kernel_rule", 1e-12)
def _kernel_rule(rng, shape, trial):
    phi, omega = random_pair(rng, shape, "omega_deficient")
    delta = build_delta(phi, omega)
    carrier = random_element(rng, shape) @ (shape.identity() - omega.support)
    v = GnsVector(carrier)
    res = 0.0
    for s in (0.1, 0.25, 0.5, 1.0):
        # round-off in s(omega) is amplified by ||Delta^s||
        gain = max(1.0, (phi.density.op_norm() * omega_tilde_norm(omega)) ** s)
        res = max(res, delta_power_apply(delta, s, v).norm() / (gain * max(1.0, v.norm())))
    return res


def omega_tilde_norm(omega: State) -> float:
    lams = omega.spectrum.eigenvalues
    return float(1 / lams[lams > 0].min())


@check("modular.trace_estimate_small_s", 1e-9)
def _trace_estimate_small_s(rng, shape, trial):
    phi, omega = random_pair(rng, shape, _kind(trial), normalize=False)
    z = random_element(rng, shape)
    s = float(rng.uniform(1e-3, 0.25))
    lhs = _estimate_lhs(phi, omega, z, s)
    rhs = (
        p_norm(phi.density, 1) ** (2 * s)
        * p_norm(omega.density, 1) ** (0.5 - 2 * s)
        * z.op_norm()
        * p_norm(z @ omega.sqrt, 2)
    )
    return _excess(lhs, rhs)


@check("modular.trace_estimate_large_s", 1e-9)
def _trace_estimate_large_s(rng, shape, trial):
    phi, omega = random_pair(rng, shape, _kind(trial), normalize=False)
    z = random_element(rng, shape)
    s = float(rng.uniform(0.25, 0.5))
    lhs = _estimate_lhs(phi, omega, z, s)
    rhs = (
        p_norm(phi.density, 1) ** (2 * s - 0.5)
        * p_norm(omega.density, 1) ** (1 - 2 * s)
        * z.op_norm()
        * p_norm(phi.sqrt @ z, 2)
    )
    return _excess(lhs, rhs)


def _estimate_lhs(phi: State, omega: State, z: Element, s: float) -> float:
    b = omega.power(0.5 - s)
    return trace(b @ z.adjoint() @ phi.power(2 * s) @ z @ b).real


@check("modular.j_involution", 0.0)
def _j_involution(rng, shape, trial):
    v = GnsVector(random_element(rng, shape))
    h = random_positive(rng, shape, random_ranks(rng, shape, deficient=trial % 2 == 1))
    cone = GnsVector(positive_power(positive_spectrum(h), 0.5))
    res = (modular_j(modular_j(v)) - v).norm()
    return res + (modular_j(cone) - cone).norm()


@check("modular.polar_decomposition", 1e-10)
def _polar_decomposition(rng, shape, trial):
    phi, omega = random_pair(rng, shape, _kind(trial))
    delta = build_delta(phi, omega)
    x = random_element(rng, shape)
    lhs = modular_j(delta_power_apply(delta, 0.5, GnsVector(x @ omega.sqrt)))
    rhs = s_operator_apply(phi, omega, x)
    return (lhs - rhs).norm() / max(1.0, x.op_norm())


@check("modular.s_star_s", 1e-10)
def _s_star_s(rng, shape, trial):
    """<S xi | S eta> = <eta | Delta xi> on D(S)."""
    phi, omega = random_pair(rng, shape, _kind(trial))
    delta = build_delta(phi, omega)
    x, y = random_element(rng, shape), random_element(rng, shape)
    lhs = inner(s_operator_apply(phi, omega, x), s_operator_apply(phi, omega, y))
    rhs = inner(GnsVector(y @ omega.sqrt), delta_power_apply(delta, 1.0, GnsVector(x @ omega.sqrt)))
    return _rel(lhs, rhs)


@check("modular.support_vs_dense", 1e-9, oracle=True)
def _support_vs_dense(rng, shape, trial):
    kind = "violating" if trial % 4 == 3 else _kind(trial)
    phi, omega = random_pair(rng, shape, kind)
    delta = build_delta(phi, omega)
    comp = delta_support(delta)
    d = shape.hilbert_dim
    ours = np.zeros((d, d), dtype=complex)
    for i in range(d):
        e = np.zeros(d)
        e[i] = 1.0
        ours[:, i] = coordinates(comp(from_coordinates(shape, e)))
    return float(np.max(np.abs(ours - dense_support_projection(dense_oracle(delta)))))


@check("modular.power_vs_dense", 1e-9, oracle=True)
def _power_vs_dense(rng, shape, trial):
    phi, omega = random_pair(rng, shape, _kind(trial))
    delta = build_delta(phi, omega)
    m = dense_oracle(delta)
    v = GnsVector(random_element(rng, shape))
    res = 0.0
    for s in (0.25, 0.5, 1.0):
        lhs = coordinates(delta_power_apply(delta, s, v))
        rhs = dense_power(m, s) @ coordinates(v)
        res = max(res, float(np.linalg.norm(lhs - rhs)) / max(1.0, float(np.linalg.norm(rhs))))
    return res


# --- entropy -------------------------------------------------------------------


@check("entropy.araki_equals_umegaki", 1e-8)
def _araki_equals_umegaki(rng, shape, trial):
    phi, omega = random_pair(rng, shape, _kind(trial), normalize=trial % 2 == 0)
    a = ent.araki_relative_entropy(phi, omega)
    return abs(a - ent.umegaki_information(omega, phi)) / max(1.0, abs(a))


@check("entropy.violation_sentinel", 0.0)
def _violation_sentinel(rng, shape, trial):
    phi = random_state(rng, shape, ranks=random_ranks(rng, shape))
    if phi.is_faithful():
        return 0.0  # no room for a violating omega in this shape
    omega = random_state(rng, shape)
    flag = ent.support_dominated(omega, phi)
    a, u = ent.araki_relative_entropy(phi, omega), ent.umegaki_information(omega, phi)
    return float(flag) + float(a != math.inf) + float(u != math.inf)


@check("entropy.double_sum", 1e-9)
def _double_sum(rng, shape, trial):
    """Modular route against sum_ij beta_j log(beta_j / alpha_i) tau(e_i f_j)."""
    phi, omega = random_pair(rng, shape, "faithful" if trial % 2 == 0 else "omega_deficient")
    if trial % 3 == 0:
        # commuting spectra in a shared random eigenbasis
        u = random_unitary(rng, shape)
        a_vals = [rng.uniform(0.05, 1, n) for n in shape.block_dims]
        b_vals = [rng.uniform(0.05, 1, n) for n in shape.block_dims]
        phi = State(Element(shape, [q @ np.diag(a) @ q.conj().T for q, a in zip(u.blocks, a_vals)]))
        omega = State(Element(shape, [q @ np.diag(b) @ q.conj().T for q, b in zip(u.blocks, b_vals)]))
    oracle = 0.0
    for wk, hp, ho in zip(shape.weights, phi.density.blocks, omega.density.blocks):
        alpha, ua = np.linalg.eigh(hp)
        beta, vb = np.linalg.eigh(ho)
        overlap = np.abs(ua.conj().T @ vb) ** 2
        for j, bj in enumerate(beta):
            if bj <= 1e-14:
                continue
            oracle += wk * float(np.sum(bj * np.log(bj / alpha) * overlap[:, j]))
    return _rel(ent.araki_relative_entropy(phi, omega), oracle)


@check("entropy.scaling_covariance", 1e-8)
def _scaling_covariance(rng, shape, trial):
    phi, omega = random_pair(rng, shape, _kind(trial))
    c = float(rng.uniform(0.2, 5))
    scaled = State(c * omega.density)
    a = ent.araki_relative_entropy(phi, scaled)
    res = _rel(a, ent.umegaki_information(scaled, phi))
    # S(phi, c omega) = c S(phi, omega) + c log(c) omega(1)
    expected = c * ent.araki_relative_entropy(phi, omega) + c * math.log(c) * omega.mass
    return max(res, _rel(a, expected))


@check("entropy.segal_oracle", 1e-10)
def _segal_oracle(rng, shape, trial):
    omega = random_state(rng, shape, ranks=random_ranks(rng, shape, deficient=trial % 2 == 1))
    oracle = 0.0
    for wk, blk in zip(shape.weights, omega.density.blocks):
        lam = np.linalg.eigvalsh(blk)
        lam = lam[lam > 1e-14]
        oracle += wk * float(np.sum(lam * np.log(lam)))
    return _rel(ent.segal_entropy(omega), oracle)


@check("entropy.quadratic_form", 1e-10)
def _quadratic_form(rng, shape, trial):
    phi, omega = random_pair(rng, shape, _kind(trial))
    res = 0.0
    for s in (0.1, 0.25, 0.4, 0.5):
        form = ent.delta_quadratic_form(phi, omega, s)
        t1 = trace(phi.power(s) @ omega.power(1 - s))
        t2 = trace(omega.power(1 - s) @ phi.power(s))
        res = max(res, _rel(form, t1), _rel(t1, t2), abs(form.imag), max(0.0, -form.real))
    return res


def _family_check(family_of: Callable[[np.random.Generator], ent.QuasiFamily]):
    def fn(rng, shape, trial):
        fam = family_of(rng)
        phi, omega = random_pair(rng, shape, _kind(trial))
        k = random_element(rng, shape)
        return _rel(
            ent.quasi_entropy_generic(fam, k, phi, omega),
            ent.quasi_entropy_closed(fam, k, phi, omega),
        )

    return fn


check("entropy.quasi_neg_log", 1e-8)(_family_check(lambda rng: ent.neg_log()))
check("entropy.quasi_power", 1e-8)(_family_check(lambda rng: ent.power_family(float(rng.uniform(0.05, 1)))))
check("entropy.quasi_t_log_t", 1e-8)(_family_check(lambda rng: ent.t_log_t()))
check("entropy.quasi_affine", 1e-8)(
    _family_check(lambda rng: ent.affine(float(rng.normal()), float(rng.normal())))
)
check("entropy.quasi_skew", 1e-8)(_family_check(lambda rng: ent.skew(float(rng.uniform(0.05, 0.95)))))


@check("entropy.skew_information", 1e-10)
def _skew_information(rng, shape, trial):
    phi = random_state(rng, shape, ranks=random_ranks(rng, shape, deficient=trial % 2 == 1))
    k = random_element(rng, shape)
    p = float(rng.uniform(0.05, 0.95))
    # k and k s(phi) give the same vector k xi; the trace form sees only the latter
    direct = ent.skew_information(phi, k @ phi.support, p)
    res = _rel(direct, ent.quasi_entropy_generic(ent.skew(p), k, phi, phi))
    if phi.is_faithful():
        res = max(res, _rel(ent.skew_information(phi, k, p), direct))
    # nonnegative for Hermitian k
    kh = (k + k.adjoint()) / 2
    return res + max(0.0, -ent.skew_information(phi, kh, p))


@check("entropy.renyi_routes", 1e-9)
def _renyi_routes(rng, shape, trial):
    phi, omega = random_pair(rng, shape, _kind(trial))
    delta = build_delta(phi, omega)
    return max(
        _rel(ent.renyi_spectral(omega, phi, a, delta), ent.renyi_relative_entropy(omega, phi, a))
        for a in ALPHA_GRID
    )


@check("entropy.renyi_order", 1e-10)
def _renyi_order(rng, shape, trial):
    """Nonnegative and nondecreasing in alpha for normalized states."""
    phi, omega = random_pair(rng, shape, _kind(trial))
    vals = [ent.renyi_relative_entropy(omega, phi, a) for a in ALPHA_GRID]
    res = max(0.0, -min(vals))
    return max(res, *(a - b for a, b in zip(vals, vals[1:])))


@check("entropy.trace_commutation", 1e-10)
def _trace_commutation(rng, shape, trial):
    x, y = random_element(rng, shape), random_element(rng, shape)
    p = float(rng.uniform(1.1, 6))
    q = p / (p - 1)
    lhs, rhs, gap = ent.trace_commutation_check(x, y, p, q)
    return gap / max(1.0, abs(lhs))


@check("entropy.trace_commutation_modular", 1e-10)
def _trace_commutation_modular(rng, shape, trial):
    x, y = random_element(rng, shape), random_element(rng, shape)
    p = float(rng.uniform(1.1, 6))
    txy, tyx = ent.trace_product_modular(x, y, p)
    direct = trace(x @ y)
    return max(_rel(txy, direct), _rel(tyx, direct))


# --- runner ---------------------------------------------------------------------


def parse_dims(spec: str) -> list[tuple[int, ...]]:
    """``"2;3;2,2"`` -> ``[(2,), (3,), (2, 2)]``; brackets and spaces are ignored."""
    cleaned = spec.replace("[", "").replace("]", "").replace(" ", "")
    shapes = []
    for part in cleaned.split(";"):
        if not part:
            continue
        try:
            dims = tuple(int(d) for d in part.split(","))
        except ValueError:
            raise ValueError(f"bad dims entry {part!r} in {spec!r}") from None
        if not dims or any(d < 1 for d in dims):
            raise ValueError(f"block dims must be >= 1 in {part!r}")
        shapes.append(dims)
    if not shapes:
        raise ValueError(f"no shapes in dims spec {spec!r}")
    return shapes


def suite_shapes(seed: int, dims_list) -> list[AlgebraShape]:
    """Weighted shapes; multi-block shapes get random weights, single blocks weight 1."""
    out = []
    for i, dims in enumerate(dims_list):
        rng = np.random.default_rng([seed, 1_000_003, i])
        out.append(random_shape(rng, dims, weighted=len(dims) > 1))
    return out


def _fmt(x: float) -> str:
    return format(x, ".3e")


def verify_suite(
    seed: int,
    dims_list,
    trials: int,
    *,
    dense_cap: int = DENSE_CAP,
    only: str | None = None,
) -> dict:
    """Run every check ``trials`` times on every shape.

    ``only`` restricts to checks whose name starts with the given prefix.
    """
    if trials < 0:
        raise ValueError("trials must be >= 0")
    shapes = suite_shapes(seed, dims_list)
    rows = []
    total_failed = total_skipped = evaluations = 0
    selected = [(i, c) for i, c in enumerate(CHECKS) if only is None or c.name.startswith(only)]
    for ci, chk in selected if trials > 0 else []:
        passed = failed = skipped = 0
        worst = 0.0
        skip_reasons, errors = [], []
        for si, shape in enumerate(shapes):
            if chk.oracle and shape.hilbert_dim > dense_cap:
                skipped += trials
                skip_reasons.append(
                    f"dims {list(shape.block_dims)}: D={shape.hilbert_dim} exceeds dense cap {dense_cap}"
                )
                continue
            for t in range(trials):
                rng = np.random.default_rng([seed, ci, si, t])
                try:
                    r = float(chk.fn(rng, shape, t))
                except Exception as exc:  # a crash is a failure, not an abort
                    r = math.inf
                    errors.append(f"dims {list(shape.block_dims)} trial {t}: {type(exc).__name__}: {exc}")
                evaluations += 1
                worst = max(worst, r) if not math.isnan(r) else math.inf
                if r <= chk.bound:
                    passed += 1
                else:
                    failed += 1
        total_failed += failed
        total_skipped += skipped
        row = {
            "name": chk.name,
            "module": chk.module,
            "bound": _fmt(chk.bound),
            "passed": passed,
            "failed": failed,
            "skipped": skipped,
            "max_residual": _fmt(worst) if passed + failed else None,
            "status": "fail" if failed else ("skipped" if passed == 0 and skipped else "pass"),
        }
        if skip_reasons:
            row["skip_reasons"] = skip_reasons
        if errors:
            row["errors"] = errors[:5]
        rows.append(row)
    return {
        "seed": seed,
        "trials": trials,
        "dense_cap": dense_cap,
        "shapes": [
            {"dims": list(s.block_dims), "weights": list(s.weights)} for s in shapes
        ],
        "checks": rows,
        "summary": {
            "checks": len(rows),
            "evaluations": evaluations,
            "failed": total_failed,
            "skipped": total_skipped,
            "status": "fail" if total_failed else "pass",
        },
    }
