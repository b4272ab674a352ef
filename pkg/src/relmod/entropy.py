"""Entropy functionals built on the relative modular operator.

Each quantity has two independent evaluations:

* the modular route, a weighted sum over the spectral pairing of
  ``Delta(phi, omega)`` (see :mod:`relmod.modular`);
* the trace route, a closed formula in the two densities.

Logarithms are natural.  ``0 log 0 = 0``.  A logarithm that meets
positive weight at zero yields ``+inf`` (or ``-inf``) rather than an error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .algebra import (
    Element,
    ShapeMismatchError,
    State,
    positive_power,
    positive_spectrum,
    spectral_decompose,
    trace,
)
from .gns import GnsVector, inner
from .modular import RelativeModular, build_delta, delta_power_apply

INF = math.inf
# mass on a zero eigenvalue below this fraction of the total counts as none
KERNEL_TOL = 1e-12


def _check(*states):
    shapes = {s.shape for s in states}
    if len(shapes) != 1:
        raise ShapeMismatchError(f"mismatched shapes: {shapes}")


def _xlogx(lams: np.ndarray) -> np.ndarray:
    safe = np.where(lams > 0, lams, 1.0)
    return np.where(lams > 0, lams * np.log(safe), 0.0)


def segal_entropy(omega: State) -> float:
    """``H(omega) = tau(h log h)``."""
    total = 0.0
    lams = omega.spectrum.eigenvalues
    ranks = omega.spectrum.ranks()
    for k, wk in enumerate(omega.shape.weights):
        total += wk * float(np.sum(ranks[:, k] * _xlogx(lams)))
    return total


def kernel_mass(omega: State, phi: State) -> float:
    """``omega(1 - s(phi))``: the part of ``omega`` living on the kernel of ``phi``."""
    return trace(omega.density @ (phi.shape.identity() - phi.support)).real


def support_dominated(omega: State, phi: State) -> bool:
    """``s(omega) <= s(phi)``, tested as ``omega(1 - s(phi)) == 0`` up to ``KERNEL_TOL``."""
    return kernel_mass(omega, phi) <= KERNEL_TOL * omega.mass


def _log_sum(mu: np.ndarray, weights: np.ndarray, sign: float) -> float:
    """``sign * sum log(mu) W`` over ``mu > 0``; ``sign * -inf`` if ``W`` sits on ``mu = 0``."""
    total = float(weights.sum())
    if float(weights[mu <= 0].sum()) > KERNEL_TOL * max(total, np.finfo(float).tiny):
        return -sign * INF
    pos = mu > 0
    return sign * float(np.sum(np.log(mu[pos]) * weights[pos]))


def araki_relative_entropy(phi: State, omega: State, delta: RelativeModular | None = None) -> float:
    """``S(phi, omega) = -<xi| log Delta(phi, omega) xi>`` with ``xi = Lambda(h_omega^(1/2))``."""
    _check(phi, omega)
    delta = delta or build_delta(phi, omega)
    weights = delta.spectral_weights(GnsVector(omega.sqrt))
    return _log_sum(delta.pair_values(), weights, -1.0)


def _expect(h_sqrt: Element, x: Element) -> float:
    return trace(h_sqrt @ x @ h_sqrt).real


def umegaki_information(omega: State, phi: State) -> float:
    """``I(omega, phi) = omega(log h_omega) - omega(log h_phi)``; ``+inf`` without support dominance."""
    _check(phi, omega)
    if not support_dominated(omega, phi):
        return INF
    return _expect(omega.sqrt, omega.log) - _expect(omega.sqrt, phi.log)


# --- quasi-entropies -------------------------------------------------------


@dataclass(frozen=True)
class QuasiFamily:
    """A scalar function ``f`` for ``S_f^k``.

    ``name`` is one of ``neg_log``, ``power``, ``t_log_t``, ``affine``,
    ``skew``; ``params`` holds ``alpha``, ``(a, b)`` or ``p`` as needed.
    """

    name: str
    params: tuple[float, ...] = field(default=())

    def __post_init__(self):
        expected = {"neg_log": 0, "power": 1, "t_log_t": 0, "affine": 2, "skew": 1}
        if self.name not in expected:
            raise ValueError(f"unsupported quasi-entropy family {self.name!r}")
        params = tuple(float(p) for p in self.params)
        if len(params) != expected[self.name]:
            raise ValueError(f"family {self.name} takes {expected[self.name]} parameters")
        if self.name == "power" and not 0 < params[0] <= 1:
            raise ValueError(f"power family needs 0 < alpha <= 1, got {params[0]}")
        if self.name == "skew" and not 0 < params[0] < 1:
            raise ValueError(f"skew family needs 0 < p < 1, got {params[0]}")
        object.__setattr__(self, "params", params)

    @property
    def label(self) -> str:
        if not self.params:
            return self.name
        return f"{self.name}({', '.join(repr(p) for p in self.params)})"

    def evaluate(self, mu: np.ndarray, weights: np.ndarray) -> float:
        """``sum f(mu) W`` with this family's handling of ``mu = 0``."""
        pos = mu > 0
        if self.name == "neg_log":
            return _log_sum(mu, weights, -1.0)
        if self.name == "power":
            (alpha,) = self.params
            return float(np.sum(np.where(pos, np.abs(mu) ** alpha, 0.0) * weights))
        if self.name == "t_log_t":
            return float(np.sum(_xlogx(mu) * weights))
        if self.name == "affine":
            a, b = self.params
            return float(np.sum((a * mu + b) * weights))
        (p,) = self.params
        return float(np.sum((mu - np.where(pos, np.abs(mu) ** p, 0.0)) * weights))


def neg_log() -> QuasiFamily:
    return QuasiFamily("neg_log")


def power_family(alpha: float) -> QuasiFamily:
    return QuasiFamily("power", (alpha,))


def t_log_t() -> QuasiFamily:
    return QuasiFamily("t_log_t")


def affine(a: float, b: float) -> QuasiFamily:
    return QuasiFamily("affine", (a, b))


def skew(p: float) -> QuasiFamily:
    return QuasiFamily("skew", (p,))


def quasi_entropy_generic(
    family: QuasiFamily, k: Element, phi: State, omega: State,
    delta: RelativeModular | None = None,
) -> float:
    """``<k xi | f(Delta) k xi>`` evaluated on the spectral pairing."""
    _check(phi, omega)
    if k.shape != phi.shape:
        raise ShapeMismatchError("k does not match the states' shape")
    delta = delta or build_delta(phi, omega)
    weights = delta.spectral_weights(GnsVector(k @ omega.sqrt))
    return family.evaluate(delta.pair_values(), weights)


def _psd_sqrt(h: Element) -> Element:
    """Square root of ``z* z``-type densities, clipping round-off below zero."""
    return positive_power(positive_spectrum(h), 0.5)


def _log_expectation(h: Element, state: State) -> float:
    """``rho(log h_state)`` for the positive functional with density ``h``.

    ``-inf`` when ``rho`` charges the kernel of ``h_state``.
    """
    total = trace(h).real
    if total <= 0:
        return 0.0
    on_kernel = trace(h @ (state.shape.identity() - state.support)).real
    if on_kernel > KERNEL_TOL * total:
        return -INF
    return _expect(_psd_sqrt(h), state.log)


def _mixed_trace(omega: State, k: Element, phi: State, alpha: float) -> float:
    """``tau(h_omega^(1-alpha) k* h_phi^alpha k)``."""
    return trace(omega.power(1 - alpha) @ k.adjoint() @ phi.power(alpha) @ k).real


def quasi_entropy_closed(family: QuasiFamily, k: Element, phi: State, omega: State) -> float:
    """Closed trace formula for ``S_f^k(phi, omega)``.

    Formulas that pass through ``Delta^(1/2) Lambda(k h_omega^(1/2))`` use
    ``k s(omega)`` in place of ``k``; both give the same vector
    ``Lambda(k h_omega^(1/2))``, and the two coincide for faithful ``omega``.
    """
    _check(phi, omega)
    if k.shape != phi.shape:
        raise ShapeMismatchError("k does not match the states' shape")
    ks = k @ omega.support
    if family.name == "neg_log":
        z = k @ omega.sqrt
        rho_term = _log_expectation(z.adjoint() @ z, omega)
        kok_term = _log_expectation(k @ omega.density @ k.adjoint(), phi)
        if kok_term == -INF:
            return INF
        return rho_term - kok_term
    if family.name == "power":
        (alpha,) = family.params
        return _mixed_trace(omega, k, phi, alpha)
    if family.name == "t_log_t":
        z1 = ks.adjoint() @ phi.sqrt
        z2 = phi.sqrt @ ks
        return _log_expectation(z1.adjoint() @ z1, phi) - _log_expectation(z2.adjoint() @ z2, omega)
    if family.name == "affine":
        a, b = family.params
        return a * phi(ks @ ks.adjoint()).real + b * omega(k.adjoint() @ k).real
    (p,) = family.params
    return phi(ks @ ks.adjoint()).real - _mixed_trace(omega, k, phi, p)


def skew_information(phi: State, k: Element, p: float) -> float:
    """``I_p(phi, k) = phi(k k*) - tau(h_phi^(1-p) k* h_phi^p k)``."""
    if not 0 < p < 1:
        raise ValueError(f"skew information needs 0 < p < 1, got {p}")
    return phi(k @ k.adjoint()).real - _mixed_trace(phi, k, phi, p)


# --- Renyi -------------------------------------------------------------------


def _renyi_gate(omega: State, phi: State, alpha: float):
    if alpha == 1:
        raise ValueError("Renyi relative entropy is undefined at alpha = 1")
    if alpha < 0:
        raise ValueError(f"alpha must be >= 0, got {alpha}")
    if alpha > 1 and not support_dominated(omega, phi):
        raise ValueError("alpha > 1 requires s(omega) <= s(phi)")


def _renyi_from_q(q: float, alpha: float) -> float:
    if q <= 0:
        return INF if alpha < 1 else -INF
    return math.log(q) / (alpha - 1)


def renyi_relative_entropy(omega: State, phi: State, alpha: float) -> float:
    """``S_alpha(omega, phi) = log tau(h_phi^(1-alpha) h_omega^alpha) / (alpha - 1)``."""
    _check(phi, omega)
    _renyi_gate(omega, phi, alpha)
    q = trace(phi.power(1 - alpha) @ omega.power(alpha)).real
    return _renyi_from_q(q, alpha)


def renyi_spectral(omega: State, phi: State, alpha: float, delta: RelativeModular | None = None) -> float:
    """Same quantity as ``log <xi| Delta^(1-alpha) xi> / (alpha - 1)`` on the pairing."""
    _check(phi, omega)
    _renyi_gate(omega, phi, alpha)
    delta = delta or build_delta(phi, omega)
    mu = delta.pair_values()
    weights = delta.spectral_weights(GnsVector(omega.sqrt))
    pos = mu > 0
    q = float(np.sum(np.abs(mu[pos]) ** (1 - alpha) * weights[pos]))
    return _renyi_from_q(q, alpha)


def delta_quadratic_form(phi: State, omega: State, s: float) -> complex:
    """``<Lambda(h_omega^(1/2)) | Delta^s Lambda(h_omega^(1/2))>`` on the pairing."""
    xi = GnsVector(omega.sqrt)
    return inner(xi, delta_power_apply(build_delta(phi, omega), s, xi))


# --- trace commutation -------------------------------------------------------


def trace_commutation_check(x: Element, y: Element, p: float, q: float) -> tuple[complex, complex, float]:
    """``(tau(xy), tau(yx), |difference|)``.

    ``1/p + 1/q = 1`` is informational here: in finite dimension every
    element lies in every ``L^p``.
    """
    if x.shape != y.shape:
        raise ShapeMismatchError(f"{x.shape} vs {y.shape}")
    lhs = trace(x @ y)
    rhs = trace(y @ x)
    return lhs, rhs, abs(lhs - rhs)


def _jordan(x: Element) -> tuple[Element, Element]:
    spec = spectral_decompose(x)
    lams = spec.eigenvalues
    return spec.assemble(np.maximum(lams, 0)), spec.assemble(np.maximum(-lams, 0))


def _positive_pair_trace(x: Element, y: Element, p: float) -> tuple[float, float]:
    """``(tau(xy), tau(yx))`` for positive ``x, y`` from ``Delta`` quadratic forms.

    With ``s = 1/p <= 1/2``, ``h_phi = x^p`` and ``h_omega = y^q``, the form
    ``<xi|Delta^s xi>`` equals ``tau(h_phi^s h_omega^(1-s)) = tau(xy)``; the
    mirrored assignment gives ``tau(yx)``.
    """
    if not 1 < p < math.inf:
        raise ValueError(f"need 1 < p < inf, got {p}")
    q = p / (p - 1)
    if p < 2:
        b, a = _positive_pair_trace(y, x, q)
        return a, b
    sx, sy = positive_spectrum(x), positive_spectrum(y)
    if sx.eigenvalues[-1] <= 0 or sy.eigenvalues[-1] <= 0:
        return 0.0, 0.0
    s = 1.0 / p
    # powers taken on the eigenvalues: re-diagonalising x^p would lose its small end
    phi = State.from_spectrum(sx.map(lambda t: t ** p))
    omega = State.from_spectrum(sy.map(lambda t: t ** q))
    txy = delta_quadratic_form(phi, omega, s)
    # conj(<xi|Delta^s xi>) = tau((h_phi^s h_omega^(1-s))*) = tau(yx)
    return txy.real, complex(txy).conjugate().real


def trace_product_modular(x: Element, y: Element, p: float) -> tuple[complex, complex]:
    """``tau(xy)`` and ``tau(yx)`` rebuilt from the modular quadratic form.

    Positive parts go through :func:`_positive_pair_trace`; general elements
    through the Jordan decomposition of their real and imaginary parts.
    """
    if x.shape != y.shape:
        raise ShapeMismatchError(f"{x.shape} vs {y.shape}")
    xr, xi = (x + x.adjoint()) / 2, (x - x.adjoint()) / 2j
    yr, yi = (y + y.adjoint()) / 2, (y - y.adjoint()) / 2j
    txy, tyx = 0j, 0j
    for cx, hx in ((1, xr), (1j, xi)):
        xp, xm = _jordan(hx)
        for cy, hy in ((1, yr), (1j, yi)):
            yp, ym = _jordan(hy)
            for sx, a in ((1, xp), (-1, xm)):
                for sy, b in ((1, yp), (-1, ym)):
                    ab, ba = _positive_pair_trace(a, b, p)
                    c = cx * cy * sx * sy
                    txy += c * ab
                    tyx += c * ba
    return txy, tyx


# --- report -------------------------------------------------------------------


@dataclass
class EntropyReport:
    segal_omega: float
    araki: float
    umegaki: float
    support_dominance: bool
    renyi: dict[float, tuple[float, float]] = field(default_factory=dict)
    quasi: dict[str, tuple[float, float]] = field(default_factory=dict)

    @property
    def araki_umegaki_residual(self) -> float:
        if math.isinf(self.araki) or math.isinf(self.umegaki):
            return 0.0 if self.araki == self.umegaki else INF
        return abs(self.araki - self.umegaki)

    def has_sentinel(self) -> bool:
        values = [self.segal_omega, self.araki, self.umegaki]
        values += [v for pair in self.renyi.values() for v in pair]
        values += [v for pair in self.quasi.values() for v in pair]
        return any(math.isinf(v) for v in values)


DEFAULT_ALPHAS = (0.0, 0.25, 0.5, 0.75, 0.9)


def entropy_report(
    phi: State,
    omega: State,
    k: Element | None = None,
    alphas=DEFAULT_ALPHAS,
    families=(),
) -> EntropyReport:
    """Every entropy quantity for ``(phi, omega, k)`` by both routes."""
    _check(phi, omega)
    delta = build_delta(phi, omega)
    dominated = support_dominated(omega, phi)
    report = EntropyReport(
        segal_omega=segal_entropy(omega),
        araki=araki_relative_entropy(phi, omega, delta),
        umegaki=umegaki_information(omega, phi),
        support_dominance=dominated,
    )
    for alpha in alphas:
        if alpha > 1 and not dominated:
            continue
        report.renyi[float(alpha)] = (
            renyi_spectral(omega, phi, alpha, delta),
            renyi_relative_entropy(omega, phi, alpha),
        )
    k = phi.shape.identity() if k is None else k
    for fam in families:
        report.quasi[fam.label] = (
            quasi_entropy_generic(fam, k, phi, omega, delta),
            quasi_entropy_closed(fam, k, phi, omega),
        )
    return report
