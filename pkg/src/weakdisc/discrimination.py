"""
Unambiguous discrimination of two qubit states: the IDP bound, the protocol's
overall success probability, and the three-outcome POVMs used to compare the
conventional and weak-measurement routes.

Priors are fixed at 1/2, 1/2 throughout.
"""
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .exceptions import (
    DegeneratePairWarning,
    NoDiscriminationError,
    PovmPositivityWarning,
    RegimeError,
    UnphysicalStateError,
)
from .qubit import (
    I2,
    X_AXIS,
    Y_AXIS,
    Z_AXIS,
    check_density,
    density_to_bloch,
    pauli_dot,
)
from .weak import (
    ETA_G_SEPARATION,
    WEAK_G_MAX,
    _as_eta,
    pointer_overlap,
    postselection_probs,
)

#: Largest state separation accepted by the POVM builders.
EPS_MAX = 0.1
#: Negative eigenvalues of a POVM element below this are reported.
POSITIVITY_FLAG = 1e-9


def idp_limit(overlap):
    """Ivanovic-Dieks-Peres bound ``1 - |<psi1|psi2>|`` for equal priors."""
    overlap = float(overlap)
    if not 0.0 <= overlap <= 1.0:
        raise ValueError(f"overlap must lie in [0, 1], got {overlap!r}")
    return 1.0 - overlap


def idp_limit_eta(eta):
    """IDP bound for the eta-parametrized pair: ``1 - 1/sqrt(1 + 2|eta|^2)``."""
    eta = _as_eta(eta)
    return 1.0 - 1.0 / math.sqrt(1 + 2 * abs(eta) ** 2)


def overall_success_exact(eta, g):
    """
    Success probability of postselect-then-discriminate::

        p = (lambda1 + lambda2)/2 * (1 - |<phi1|phi2>|)
          = (|eta|^2 + sin^2 g)/(1 + 2|eta|^2) * (1 - |sin g|/sqrt(2|eta|^2 cos^2 g + sin^2 g))

    Returns 0 at the fully degenerate point ``eta = 0, sin g = 0``.
    """
    eta = _as_eta(eta)
    lam1, lam2 = postselection_probs(eta, g)
    if eta == 0 and math.sin(g) == 0:
        return 0.0
    return 0.5 * (lam1 + lam2) * (1.0 - pointer_overlap(eta, g))


def overall_success_approx(eta, g):
    """
    Weak-coupling approximation ``|eta|^2 cos^2 g``.

    Only meaningful for ``|eta| << g << 1``; enforced as ``|eta| <= g/10`` and
    ``g <= 0.3``, otherwise :class:`RegimeError`.
    """
    eta = _as_eta(eta)
    if not (abs(eta) <= g / ETA_G_SEPARATION and g <= WEAK_G_MAX):
        raise RegimeError(
            f"approximation requires |eta| <= g/{ETA_G_SEPARATION:g} and g <= {WEAK_G_MAX}; "
            f"got |eta|={abs(eta)!r}, g={g!r}")
    return abs(eta) ** 2 * math.cos(g) ** 2


@dataclass(frozen=True)
class PovmSet:
    """Three-outcome measurement: state 1, state 2, inconclusive."""

    pi1: np.ndarray
    pi2: np.ndarray
    piQ: np.ndarray
    flags: tuple = field(default=())

    @property
    def elements(self):
        return (self.pi1, self.pi2, self.piQ)

    def min_eigenvalues(self):
        return tuple(float(np.linalg.eigvalsh(e).min()) for e in self.elements)

    @property
    def negativity(self):
        """Magnitude of the most negative eigenvalue over all elements (0 if none)."""
        return max(0.0, -min(self.min_eigenvalues()))

    def completeness_error(self):
        return float(np.max(np.abs(self.pi1 + self.pi2 + self.piQ - I2)))


def _finish_povm(pi1, pi2, tolerated=0.0):
    pi1 = 0.5 * (pi1 + pi1.conj().T)
    pi2 = 0.5 * (pi2 + pi2.conj().T)
    povm = PovmSet(pi1, pi2, I2 - pi1 - pi2)
    flags = []
    neg = povm.negativity
    if neg > POSITIVITY_FLAG:
        # numbers go in the flag, not the message, so the warning deduplicates
        within = neg <= tolerated
        flags.append(f"negative-eigenvalue {-neg:.3e} "
                     f"({'within' if within else 'beyond'} tolerance {tolerated:.3e})")
        warnings.warn("POVM element has a negative eigenvalue; see PovmSet.flags",
                      PovmPositivityWarning, stacklevel=3)
    return PovmSet(povm.pi1, povm.pi2, povm.piQ, tuple(flags))


def optimal_unambiguous_povm(rho1, rho2):
    """
    Optimal equal-prior unambiguous POVM for two pure qubit states::

        pi1 = (I - k2.sigma) / (2 (1 + s)),   pi2 = (I - k1.sigma) / (2 (1 + s))

    with ``s = |<psi1|psi2>|``; it never errs and succeeds with probability
    ``1 - s``.
    """
    k1 = density_to_bloch(rho1)
    k2 = density_to_bloch(rho2)
    for k in (k1, k2):
        if abs(np.linalg.norm(k) - 1) > 1e-9:
            raise UnphysicalStateError("optimal unambiguous POVM needs pure states")
    if np.linalg.norm(k1 - k2) < 1e-12:
        raise NoDiscriminationError("the two states are identical")
    s = math.sqrt(max(0.0, (1 + float(k1 @ k2)) / 2))
    scale = 1.0 / (2 * (1 + s))
    return _finish_povm(scale * (I2 - pauli_dot(k2)), scale * (I2 - pauli_dot(k1)))


def _check_in_plane(delta_f):
    delta_f = np.asarray(delta_f, dtype=float)
    if delta_f.shape != (3,) or not np.all(np.isfinite(delta_f)):
        raise ValueError(f"delta_f must be a finite 3-vector, got {delta_f!r}")
    if abs(delta_f[2]) > 1e-12:
        raise ValueError("delta_f must lie in the X-Y plane (zero Z component)")
    return delta_f


def tilted_pi1_bloch(shift, along, across, delta_f):
    """
    Unit Bloch vector of the imperfect first POVM element.

    The ideal vector is ``sqrt(1 - shift^2) Z - shift * along``; the deviation
    ``delta_f`` (in the X-Y plane) is added to the transverse part and the Z
    component renormalized.  ``delta_f`` may carry leading batch axes.
    """
    delta_f = np.asarray(delta_f, dtype=float)
    d_along = delta_f @ along
    d_across = delta_f @ across
    z2 = 1.0 - (d_along - shift) ** 2 - d_across ** 2
    if np.any(z2 < 0):
        raise RegimeError("POVM deviation too large: transverse Bloch component exceeds 1")
    return (np.sqrt(z2)[..., None] * Z_AXIS
            + (d_along - shift)[..., None] * along
            + d_across[..., None] * across)


def _tilted_povm(shift, along, across, prefactor, delta_f, tolerated):
    m1 = tilted_pi1_bloch(shift, along, across, delta_f)
    pi1 = prefactor * (I2 + pauli_dot(m1))
    pi2 = prefactor * (I2 + pauli_dot(Z_AXIS))
    if shift == 0 and not np.any(delta_f):
        warnings.warn("the two states coincide; pi1 = pi2", DegeneratePairWarning, stacklevel=3)
    return _finish_povm(pi1, pi2, tolerated)


def conventional_prefactor(eps):
    return 1.0 / (4 - eps ** 2 / 4)


def weak_prefactor(eps, g):
    return 1.0 / (4 - eps ** 2 / g ** 2)


def povm_conventional(eps, delta_f=(0.0, 0.0, 0.0)):
    """
    POVM on qubit A for the pair ``k1 = -Z``, ``k2 = -sqrt(1-eps^2) Z + eps Y``::

        pi1 = [I + (sqrt(1 - (d.Y - eps)^2 - (d.X)^2) Z - eps Y + d) . sigma] / (4 - eps^2/4)
        pi2 = (I + Z . sigma) / (4 - eps^2/4)
        pi? = I - pi1 - pi2

    ``d = delta_f`` is an imperfection of ``pi1`` in the X-Y plane.
    """
    eps = float(eps)
    if not 0.0 <= eps <= EPS_MAX:
        raise RegimeError(f"eps must lie in [0, {EPS_MAX}], got {eps!r}")
    delta_f = _check_in_plane(delta_f)
    return _tilted_povm(eps, Y_AXIS, X_AXIS, conventional_prefactor(eps), delta_f,
                        tolerated=10 * eps ** 4)


def povm_weak(eps, g, delta_f=(0.0, 0.0, 0.0)):
    """
    POVM on pointer qubit B for ``k1 = -Z``, ``k2 = -sqrt(1-s^2) Z + s X``
    with ``s = 2 eps / g``::

        pi1 = [I + (sqrt(1 - (d.X - s)^2 - (d.Y)^2) Z - s X + d) . sigma] / (4 - eps^2/g^2)
        pi2 = (I + Z . sigma) / (4 - eps^2/g^2)
        pi? = I - pi1 - pi2
    """
    eps = float(eps)
    g = float(g)
    if not 0.0 <= eps <= EPS_MAX:
        raise RegimeError(f"eps must lie in [0, {EPS_MAX}], got {eps!r}")
    if g <= 0 or 2 * eps / g > 1:
        raise RegimeError(f"need 2 eps / g <= 1, got eps={eps!r}, g={g!r}")
    delta_f = _check_in_plane(delta_f)
    s = 2 * eps / g
    return _tilted_povm(s, X_AXIS, Y_AXIS, weak_prefactor(eps, g), delta_f,
                        tolerated=10 * s ** 4)


@dataclass(frozen=True)
class DiscriminationReport:
    p_success: float
    p_error: float
    p_inconclusive: float
    #: conditional[i, j] = Tr(rho_{i+1} pi_j) with j over (1, 2, ?)
    conditional: np.ndarray


def discriminate(rho1, rho2, povm):
    """Outcome statistics of ``povm`` on the two states at equal priors."""
    rho1 = check_density(rho1)
    rho2 = check_density(rho2)
    cond = np.array([[np.trace(rho @ e).real for e in povm.elements] for rho in (rho1, rho2)])
    return DiscriminationReport(
        p_success=0.5 * (cond[0, 0] + cond[1, 1]),
        p_error=0.5 * (cond[0, 1] + cond[1, 0]),
        p_inconclusive=0.5 * (cond[0, 2] + cond[1, 2]),
        conditional=cond,
    )
