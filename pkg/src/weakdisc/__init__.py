"""Unambiguous discrimination of nearly identical qubit states by weak measurement."""
from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("artifact")
except PackageNotFoundError:  # pragma: no cover - running from a source tree
    __version__ = "0.0.0+local"

from .discrimination import (
    DiscriminationReport,
    PovmSet,
    discriminate,
    idp_limit,
    idp_limit_eta,
    optimal_unambiguous_povm,
    overall_success_approx,
    overall_success_exact,
    povm_conventional,
    povm_weak,
)
from .exceptions import (
    DegeneratePostselectionError,
    NoDiscriminationError,
    RegimeError,
    UnphysicalStateError,
    WeakDiscError,
)
from .imperfections import (
    BetaResult,
    McSummary,
    beta_a_formula,
    beta_b_formula,
    beta_ratio,
    mc_average_beta,
    perturbed_pointer_blochs,
)
from .qubit import (
    bloch_to_density,
    density_to_bloch,
    fidelity_overlap,
    partial_trace_A,
    tensor,
)
from .weak import (
    Regime,
    StatePair,
    UpdateCoeffs,
    bloch_update_coeffs,
    coupling_unitary,
    evolve_postselect,
    make_state_pair,
    pointer_states_analytic,
    postselection_probs,
    regime_check,
)

__all__ = [
    "__version__",
    "DiscriminationReport",
    "PovmSet",
    "discriminate",
    "idp_limit",
    "idp_limit_eta",
    "optimal_unambiguous_povm",
    "overall_success_approx",
    "overall_success_exact",
    "povm_conventional",
    "povm_weak",
    "DegeneratePostselectionError",
    "NoDiscriminationError",
    "RegimeError",
    "UnphysicalStateError",
    "WeakDiscError",
    "BetaResult",
    "McSummary",
    "beta_a_formula",
    "beta_b_formula",
    "beta_ratio",
    "mc_average_beta",
    "perturbed_pointer_blochs",
    "bloch_to_density",
    "density_to_bloch",
    "fidelity_overlap",
    "partial_trace_A",
    "tensor",
    "Regime",
    "StatePair",
    "UpdateCoeffs",
    "bloch_update_coeffs",
    "coupling_unitary",
    "evolve_postselect",
    "make_state_pair",
    "pointer_states_analytic",
    "postselection_probs",
    "regime_check",
]
