"""
Weak coupling of a system qubit A to a pointer qubit B, followed by
postselection of A.

The coupling is the impulse unitary ``U = exp[-i g (n.sigma_A) x (n.sigma_B)]``.
Because ``((n.sigma) x (n.sigma))**2 = I`` it is evaluated in closed form as
``cos(g) I - i sin(g) (n.sigma) x (n.sigma)``.
"""
import math
import warnings
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .exceptions import (
    DegeneratePostselectionError,
    ZeroProbabilityBranchWarning,
)
from .qubit import (
    I2,
    KET0,
    KET1,
    X_AXIS,
    Z_AXIS,
    check_bloch,
    check_density,
    from_x_basis,
    partial_trace_A,
    pauli_dot,
    tensor,
)

#: Postselection probabilities below this are treated as zero.
PROB_FLOOR = 1e-14

#: Thresholds used by :func:`regime_check`.
QUARTER_PI_WINDOW = 0.01
ETA_G_SEPARATION = 10.0
WEAK_G_MAX = 0.3


def _as_eta(eta):
    eta = complex(eta)
    if not (math.isfinite(eta.real) and math.isfinite(eta.imag)):
        raise ValueError(f"eta must be finite, got {eta!r}")
    return eta


@dataclass(frozen=True)
class StatePair:
    """The two candidate states of qubit A, as z-basis amplitudes."""

    psi1: np.ndarray
    psi2: np.ndarray
    eta: complex

    @property
    def overlap(self):
        return abs(np.vdot(self.psi1, self.psi2))


def make_state_pair(eta):
    """
    Build the pair of states separated by the similarity parameter ``eta``.

    In the x basis::

        psi1 = (|0>_x - |1>_x)/sqrt(2)
        psi2 = ((eta + 1/sqrt(2))|0>_x + (eta - 1/sqrt(2))|1>_x) / sqrt(1 + 2|eta|^2)

    so that ``|<psi1|psi2>| = 1/sqrt(1 + 2|eta|^2)``.  In the z basis these
    are ``|1>_z`` and ``(sqrt(2) eta |0>_z + |1>_z)/sqrt(1 + 2|eta|^2)``.
    """
    eta = _as_eta(eta)
    r = 1 / math.sqrt(2)
    norm = math.sqrt(1 + 2 * abs(eta) ** 2)
    psi1 = from_x_basis(r, -r)
    psi2 = from_x_basis((eta + r) / norm, (eta - r) / norm)
    return StatePair(psi1, psi2, eta)


#: Postselection direction for qubit A: the state (|0>_x + |1>_x)/sqrt(2) = |0>_z.
DEFAULT_POSTSELECTION = Z_AXIS
#: Initial pointer state |0>_z.
DEFAULT_POINTER = Z_AXIS


def coupling_unitary(g, axis=X_AXIS):
    """4x4 unitary ``cos(g) I - i sin(g) (n.sigma) x (n.sigma)`` for unit axis ``n``."""
    g = float(g)
    if not 0.0 <= g <= math.pi:
        raise ValueError(f"interaction strength g must lie in [0, pi], got {g!r}")
    n = check_bloch(axis, pure=True)
    ns = pauli_dot(n)
    return math.cos(g) * np.eye(4) - 1j * math.sin(g) * tensor(ns, ns)


@dataclass(frozen=True)
class PostselectedOutcome:
    pointer_state: np.ndarray
    success_prob: float


def evolve_joint(rho_A, rho_B, U):
    """Joint state ``U (rho_A x rho_B) U^dagger``."""
    return U @ tensor(rho_A, rho_B) @ U.conj().T


def evolve_postselect(rho_A, rho_B, U, f=DEFAULT_POSTSELECTION, *, complement=False):
    """
    Couple, postselect qubit A on ``Pi_f = (I + f.sigma)/2`` and return the
    conditional state of qubit B with the postselection probability.

    With ``complement=True`` the orthogonal outcome ``I - Pi_f`` is kept instead.

    Raises
    ------
    DegeneratePostselectionError
        If the postselection probability is below ``PROB_FLOOR``.
    """
    rho_A = check_density(rho_A)
    rho_B = check_density(rho_B)
    f = check_bloch(f, pure=True)
    proj = 0.5 * (I2 + pauli_dot(f))
    if complement:
        proj = I2 - proj
    joint = evolve_joint(rho_A, rho_B, np.asarray(U, dtype=complex))
    unnormalized = partial_trace_A(tensor(proj, I2) @ joint)
    prob = float(np.trace(unnormalized).real)
    if prob < PROB_FLOOR:
        raise DegeneratePostselectionError(
            f"postselection probability {prob!r} is below {PROB_FLOOR}", prob)
    pointer = unnormalized / prob
    # re-symmetrize to strip rounding noise from the Hermitian part
    pointer = 0.5 * (pointer + pointer.conj().T)
    return PostselectedOutcome(pointer, min(prob, 1.0))


def postselection_probs(eta, g):
    """
    The two postselection probabilities, in the order::

        lambda1 = (2|eta|^2 cos^2 g + sin^2 g) / (1 + 2|eta|^2)
        lambda2 = sin^2 g

    Note the first expression is the success probability of the branch that
    starts from ``psi2`` and the second that of ``psi1`` (``psi1 = |1>_z`` is
    orthogonal to the postselected ``|0>_z`` until the coupling acts).
    """
    eta = _as_eta(eta)
    e2 = abs(eta) ** 2
    s2 = math.sin(g) ** 2
    c2 = math.cos(g) ** 2
    return (2 * e2 * c2 + s2) / (1 + 2 * e2), s2


def pointer_states_analytic(eta, g):
    """
    Conditional pointer states after postselection::

        phi1 = |1>_z
        phi2 = (sqrt(2) eta* cos g |0>_z - i sin g |1>_z) / sqrt(2|eta|^2 cos^2 g + sin^2 g)

    ``phi1`` comes from ``psi1`` and ``phi2`` from ``psi2``.  When ``sin g = 0``
    the ``psi1`` branch has zero probability; ``phi1`` is still returned but a
    :class:`ZeroProbabilityBranchWarning` is issued.  If in addition
    ``eta = 0`` both branches vanish and the call fails.
    """
    eta = _as_eta(eta)
    lam_psi2, lam_psi1 = postselection_probs(eta, g)
    if lam_psi1 < PROB_FLOOR and lam_psi2 < PROB_FLOOR:
        raise DegeneratePostselectionError(
            "both postselection branches have zero probability (sin g = 0, eta = 0)")
    if lam_psi1 < PROB_FLOOR:
        warnings.warn("the psi1 postselection branch has zero probability at sin g = 0",
                      ZeroProbabilityBranchWarning, stacklevel=2)
    c, s = math.cos(g), math.sin(g)
    norm = math.sqrt(2 * abs(eta) ** 2 * c * c + s * s)
    phi1 = KET1.copy()
    phi2 = (math.sqrt(2) * eta.conjugate() * c * KET0 - 1j * s * KET1) / norm
    return phi1, phi2


def pointer_overlap(eta, g):
    """``|<phi1|phi2>| = |sin g| / sqrt(2|eta|^2 cos^2 g + sin^2 g)``."""
    eta = _as_eta(eta)
    s = abs(math.sin(g))
    if s == 0.0:
        if eta == 0:
            raise DegeneratePostselectionError("pointer overlap undefined at sin g = 0, eta = 0")
        return 0.0  # phi1 = |1>, phi2 = |0>
    # hypot keeps the denominator from underflowing for subnormal arguments
    return s / math.hypot(math.sqrt(2) * abs(eta) * math.cos(g), s)


class Regime(str, Enum):
    NEAR_QUARTER_PI = "near-quarter-pi"
    ETA_MUCH_LESS_THAN_G = "eta-much-less-than-g"
    NEITHER = "neither"


def regime_check(eta, g):
    """Classify ``(eta, g)`` by which equal-prior condition (if any) it meets."""
    eta = _as_eta(eta)
    if abs(g - math.pi / 4) <= QUARTER_PI_WINDOW:
        return Regime.NEAR_QUARTER_PI
    if abs(eta) <= g / ETA_G_SEPARATION and g <= WEAK_G_MAX:
        return Regime.ETA_MUCH_LESS_THAN_G
    return Regime.NEITHER


@dataclass(frozen=True)
class UpdateCoeffs:
    c1: float
    c2: float
    c3: float
    alpha1: float
    alpha2: float
    alpha3: float
    alpha4: float

    def apply(self, k_B, n):
        """Reconstruct the updated pointer vector ``c1 k_B + c2 n + c3 (n x k_B)``."""
        k_B = np.asarray(k_B, dtype=float)
        n = np.asarray(n, dtype=float)
        return self.c1 * k_B + self.c2 * n + self.c3 * np.cross(n, k_B)


def bloch_update_coeffs(k_A, k_B, f, n, g):
    """
    Coefficients expressing the postselected pointer Bloch vector in the
    frame ``(k_B, n, n x k_B)``.

    ::

        alpha1 = cos^2 g (1 + f.k_A)
        alpha2 = 2 sin g cos g f.(n x k_A)
        alpha3 = sin^2 g [1 + (n.k_A)(f.n) - f.(n x (k_A x n))]
        alpha4 = 2 (n.k_A + f.n) sin g cos g

        D  = alpha1 + alpha2 (n.k_B) + alpha3
        c1 = (alpha1 - alpha3) / D
        c2 = (alpha2 + 2 alpha3 (n.k_B)) / D
        c3 = alpha4 / D

    ``D/2`` is the postselection probability.  ``n x (k_A x n)`` and
    ``(n x k_A) x n`` coincide, both being the part of ``k_A`` orthogonal to ``n``.
    """
    k_A = check_bloch(k_A)
    k_B = check_bloch(k_B)
    f = check_bloch(f, pure=True)
    n = check_bloch(n, pure=True)
    c, s = math.cos(g), math.sin(g)
    n_kA = n @ k_A
    f_n = f @ n
    alpha1 = c * c * (1 + f @ k_A)
    alpha2 = 2 * s * c * (f @ np.cross(n, k_A))
    alpha3 = s * s * (1 + n_kA * f_n - f @ np.cross(n, np.cross(k_A, n)))
    alpha4 = 2 * (n_kA + f_n) * s * c
    m = n @ k_B
    denom = alpha1 + alpha2 * m + alpha3
    if denom < PROB_FLOOR:
        raise DegeneratePostselectionError(
            f"update denominator {denom!r} is below {PROB_FLOOR}", denom / 2)
    return UpdateCoeffs(
        c1=(alpha1 - alpha3) / denom,
        c2=(alpha2 + 2 * alpha3 * m) / denom,
        c3=alpha4 / denom,
        alpha1=alpha1, alpha2=alpha2, alpha3=alpha3, alpha4=alpha4,
    )


def updated_pointer_bloch(k_A, k_B, f, n, g):
    """Postselected pointer Bloch vector from :func:`bloch_update_coeffs`."""
    return bloch_update_coeffs(k_A, k_B, f, n, g).apply(k_B, n)


def protocol_outcomes(eta, g, *, complement=False):
    """
    Run the exact 4x4 protocol for both source states of ``make_state_pair(eta)``:
    coupling about X with strength ``g``, pointer ``|0>_z``, postselection on
    ``|0>_z``.  Returns ``(outcome_psi1, outcome_psi2)``.
    """
    pair = make_state_pair(eta)
    U = coupling_unitary(g)
    rho_B = np.outer(KET0, KET0.conj())
    return tuple(
        evolve_postselect(np.outer(psi, psi.conj()), rho_B, U, DEFAULT_POSTSELECTION,
                          complement=complement)
        for psi in (pair.psi1, pair.psi2)
    )
