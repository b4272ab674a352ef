"""Relative modular operators and relative entropies on finite-dimensional
semifinite von Neumann algebras, modelled as direct sums of matrix blocks
with a weighted trace."""

from .algebra import (
    AlgebraShape,
    Element,
    NotHermitianError,
    NotPositiveError,
    ShapeMismatchError,
    SpectralDecomposition,
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
from .entropy import (
    EntropyReport,
    QuasiFamily,
    araki_relative_entropy,
    entropy_report,
    quasi_entropy_closed,
    quasi_entropy_generic,
    renyi_relative_entropy,
    renyi_spectral,
    segal_entropy,
    skew_information,
    trace_commutation_check,
    umegaki_information,
)
from .gns import GnsVector, apply_left, apply_right, expectation, inner, vec
from .modular import (
    RelativeModular,
    build_delta,
    delta_power_apply,
    delta_support,
    dense_oracle,
    modular_j,
    s_operator_apply,
)

__version__ = "0.1.0"
