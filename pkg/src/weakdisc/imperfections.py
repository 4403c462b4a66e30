"""
Imperfect operations: deviations of the coupling axis and of the POVM, the
success-to-error ratio beta, and its Monte-Carlo average over random POVM
deviations.

Geometry (Z is the well-defined axis):

* source pair on qubit A: ``k_A1 = -Z``, ``k_A2 = -sqrt(1 - eps^2) Z + eps Y``
* coupling axis: ``n = sqrt(1 - |d_n|^2) X + d_n`` with ``d_n . X = 0``
* postselection ``f = Z`` and initial pointer ``k_B = Z``
"""
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .discrimination import (
    EPS_MAX,
    _check_in_plane,
    conventional_prefactor,
    povm_conventional,
    povm_weak,
    tilted_pi1_bloch,
    weak_prefactor,
)
from .exceptions import RegimeError
from .qubit import (
    I2,
    PAULIS,
    X_AXIS,
    Y_AXIS,
    Z_AXIS,
    bloch_to_density,
    check_density,
    density_to_bloch,
)
from .weak import ETA_G_SEPARATION, WEAK_G_MAX, coupling_unitary, evolve_postselect

#: beta is reported as unbounded when the error probability sum is at most this.
ERROR_FLOOR = 1e-15
#: Samples per RNG chunk; fixes the sample -> stream mapping independently of workers.
MC_CHUNK = 8192
RNG_ALGORITHM = "numpy.Philox4x64-10 (key=seed, counter word 1 = chunk index)"


def source_blochs(eps):
    """Bloch vectors ``(k_A1, k_A2)`` of the two source states."""
    eps = float(eps)
    if not 0.0 <= eps <= 1.0:
        raise ValueError(f"eps must lie in [0, 1], got {eps!r}")
    return -Z_AXIS.copy(), -math.sqrt(1 - eps * eps) * Z_AXIS + eps * Y_AXIS


def coupling_axis(delta_n=(0.0, 0.0, 0.0)):
    """Unit coupling axis ``sqrt(1 - |d|^2) X + d`` for a deviation ``d`` orthogonal to X."""
    d = np.asarray(delta_n, dtype=float)
    if d.shape != (3,):
        raise ValueError("delta_n must be a 3-vector")
    if abs(d @ X_AXIS) > 1e-12:
        raise ValueError("delta_n must be orthogonal to X")
    mag2 = float(d @ d)
    if mag2 >= 1:
        raise ValueError("|delta_n| must be below 1")
    return math.sqrt(1 - mag2) * X_AXIS + d


def perturbed_pointer_blochs(eps, g, delta_n=(0.0, 0.0, 0.0)):
    """
    First-order pointer Bloch vectors after coupling and postselection::

        k_B1 = -Z
        k_B2 = -sqrt(1 - (2 eps/g)^2) Z + (2 eps/g) X

    Terms of order ``|delta_n|^2`` are dropped, so ``delta_n`` only enters the
    preconditions.  Requires ``eps <= g/10``, ``g <= 0.3`` and
    ``|delta_n| <= 10 eps``.
    """
    eps, g = float(eps), float(g)
    d = np.asarray(delta_n, dtype=float)
    if g <= 0 or 2 * eps / g > 1:
        raise RegimeError(f"need 2 eps / g <= 1, got eps={eps!r}, g={g!r}")
    if eps < 0 or eps > g / ETA_G_SEPARATION or g > WEAK_G_MAX:
        raise RegimeError(f"need 0 <= eps <= g/10 and g <= {WEAK_G_MAX}; got eps={eps!r}, g={g!r}")
    if np.linalg.norm(d) > 10 * eps:
        raise RegimeError("|delta_n| must not exceed 10 eps")
    return _weak_pair(eps, g)


def _weak_pair(eps, g):
    s = 2 * eps / g
    return -Z_AXIS.copy(), -math.sqrt(1 - s * s) * Z_AXIS + s * X_AXIS


def exact_pointer_blochs(eps, g, delta_n=(0.0, 0.0, 0.0)):
    """Pointer Bloch vectors from the full 4x4 evolution, for the same geometry."""
    U = coupling_unitary(g, coupling_axis(delta_n))
    rho_B = bloch_to_density(Z_AXIS)
    return tuple(
        density_to_bloch(evolve_postselect(bloch_to_density(k), rho_B, U, Z_AXIS).pointer_state)
        for k in source_blochs(eps)
    )


@dataclass(frozen=True)
class BetaResult:
    beta: float
    success_sum: float
    error_sum: float

    @property
    def unbounded(self):
        return math.isinf(self.beta)


def beta_ratio(rho1, rho2, povm):
    """``[Tr(rho1 pi1) + Tr(rho2 pi2)] / [Tr(rho1 pi2) + Tr(rho2 pi1)]``."""
    rho1 = check_density(rho1)
    rho2 = check_density(rho2)
    success = float(np.trace(rho1 @ povm.pi1).real + np.trace(rho2 @ povm.pi2).real)
    error = float(np.trace(rho1 @ povm.pi2).real + np.trace(rho2 @ povm.pi1).real)
    if error <= ERROR_FLOOR:
        return BetaResult(math.inf, success, error)
    return BetaResult(success / error, success, error)


def _beta_closed_form(shift, d_along, d_mag2):
    # shape-preserving: works on scalars and arrays
    with np.errstate(divide="ignore", invalid="ignore"):
        beta = 1 + (shift ** 2 - shift * d_along) / (0.5 * d_mag2)
    return np.where(d_mag2 == 0, np.inf, beta)


def beta_a_formula(eps, delta_f):
    """``1 + [eps^2 - eps (d.Y)] / (|d|^2 / 2)``; ``inf`` when ``d = 0``."""
    eps = float(eps)
    if not 0.0 <= eps <= EPS_MAX:
        raise RegimeError(f"eps must lie in [0, {EPS_MAX}], got {eps!r}")
    d = _check_in_plane(delta_f)
    return float(_beta_closed_form(eps, d @ Y_AXIS, d @ d))


def beta_b_formula(eps, g, delta_f):
    """``1 + [(2eps/g)^2 - (2eps/g)(d.X)] / (|d|^2 / 2)``; ``inf`` when ``d = 0``."""
    eps, g = float(eps), float(g)
    if not 0.0 <= eps <= EPS_MAX:
        raise RegimeError(f"eps must lie in [0, {EPS_MAX}], got {eps!r}")
    if g <= 0 or 2 * eps / g > 1:
        raise RegimeError(f"need 2 eps / g <= 1, got eps={eps!r}, g={g!r}")
    d = _check_in_plane(delta_f)
    return float(_beta_closed_form(2 * eps / g, d @ X_AXIS, d @ d))


def conventional_states(eps):
    return tuple(bloch_to_density(k) for k in source_blochs(eps))


def weak_states(eps, g):
    """
    Density matrices of the pointer pair ``-Z`` and ``-sqrt(1-s^2) Z + s X``,
    ``s = 2 eps/g``.  Only ``s <= 1`` is required here; the stricter
    ``eps <= g/10`` belongs to :func:`perturbed_pointer_blochs`.
    """
    eps, g = float(eps), float(g)
    if eps < 0 or g <= 0 or 2 * eps / g > 1:
        raise RegimeError(f"need 0 <= 2 eps / g <= 1, got eps={eps!r}, g={g!r}")
    return tuple(bloch_to_density(k) for k in _weak_pair(eps, g))


def beta_a_trace(eps, delta_f):
    rho1, rho2 = conventional_states(eps)
    return beta_ratio(rho1, rho2, povm_conventional(eps, delta_f))


def beta_b_trace(eps, g, delta_f):
    rho1, rho2 = weak_states(eps, g)
    return beta_ratio(rho1, rho2, povm_weak(eps, g, delta_f))


@dataclass(frozen=True)
class McSummary:
    mean_beta_a: float
    mean_beta_b: float
    sample_count: int
    std_error_a: float
    std_error_b: float
    seed: int
    mean_trace_beta_a: float
    mean_trace_beta_b: float
    rng_algorithm: str = RNG_ALGORITHM


def _chunk_deviations(seed, chunk, size, magnitude, mode):
    gen = np.random.Generator(np.random.Philox(key=seed, counter=[0, chunk, 0, 0]))
    if mode == "uniform-angle":
        theta = gen.uniform(0.0, 2 * math.pi, size)
        xy = magnitude * np.column_stack([np.cos(theta), np.sin(theta)])
    elif mode == "gaussian":
        xy = gen.standard_normal((size, 2)) * (magnitude / math.sqrt(2))
    else:
        raise ValueError(f"unknown deviation mode {mode!r}")
    return np.column_stack([xy, np.zeros(size)])


def sample_deviations(seed, samples, magnitude, mode="uniform-angle", workers=1):
    """
    ``samples`` random X-Y plane deviations, drawn in fixed-size chunks.

    Sample ``i`` always comes from chunk ``i // MC_CHUNK`` of the Philox stream
    keyed by ``seed``, so the result does not depend on ``workers``.
    """
    seed = int(seed)
    if not 0 <= seed < 2 ** 64:
        raise ValueError("seed must be an unsigned 64-bit integer")
    sizes = [min(MC_CHUNK, samples - start) for start in range(0, samples, MC_CHUNK)]
    jobs = [(seed, i, size, magnitude, mode) for i, size in enumerate(sizes)]
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda job: _chunk_deviations(*job), jobs))
    else:
        parts = [_chunk_deviations(*job) for job in jobs]
    return np.concatenate(parts)


def _trace_betas(k1, k2, m1, prefactor):
    rho1 = bloch_to_density(k1)
    rho2 = bloch_to_density(k2)
    pi1 = prefactor * (I2 + np.tensordot(m1, PAULIS, axes=([-1], [0])))
    pi2 = prefactor * (I2 + PAULIS[2])
    tr = lambda rho, pi: np.einsum("ij,...ji->...", rho, pi).real
    success = tr(rho1, pi1) + tr(rho2, pi2)
    error = tr(rho1, pi2) + tr(rho2, pi1)
    with np.errstate(divide="ignore"):
        return np.where(error <= ERROR_FLOOR, np.inf, success / error)


def _mean_and_error(values):
    n = values.size
    mean = float(np.mean(values))
    if not math.isfinite(mean):
        return mean, math.inf
    if n < 2:
        return mean, math.nan
    return mean, float(np.std(values, ddof=1) / math.sqrt(n))


def mc_average_beta(eps, g, delta_f_mag, samples, seed, *, mode="uniform-angle", workers=1):
    """
    Average both betas over random POVM deviations of fixed magnitude.

    Each sample draws ``d = delta_f_mag (cos t, sin t, 0)`` with ``t`` uniform
    on ``[0, 2 pi)`` (``mode="gaussian"`` draws ``d`` from an isotropic normal
    with ``E|d|^2 = delta_f_mag^2`` instead) and evaluates the closed-form and
    trace-based ratios.  The closed-form means converge to::

        <beta_A> = 1 + 2 eps^2 / |d|^2
        <beta_B> = 1 + (2/g)^2 * 2 eps^2 / |d|^2
    """
    samples = int(samples)
    if samples < 1:
        raise ValueError("samples must be at least 1")
    eps, g, delta_f_mag = float(eps), float(g), float(delta_f_mag)
    if not 0.0 <= eps <= EPS_MAX:
        raise RegimeError(f"eps must lie in [0, {EPS_MAX}], got {eps!r}")
    if g <= 0 or 2 * eps / g > 1:
        raise RegimeError(f"need 2 eps / g <= 1, got eps={eps!r}, g={g!r}")
    if delta_f_mag < 0:
        raise ValueError("delta_f_mag must be non-negative")

    d = sample_deviations(seed, samples, delta_f_mag, mode, workers)
    d_mag2 = np.einsum("ij,ij->i", d, d)
    s = 2 * eps / g
    beta_a = _beta_closed_form(eps, d[:, 1], d_mag2)
    beta_b = _beta_closed_form(s, d[:, 0], d_mag2)

    kA1, kA2 = source_blochs(eps)
    kB1 = -Z_AXIS
    kB2 = -math.sqrt(1 - s * s) * Z_AXIS + s * X_AXIS
    trace_a = _trace_betas(kA1, kA2, tilted_pi1_bloch(eps, Y_AXIS, X_AXIS, d),
                           conventional_prefactor(eps))
    trace_b = _trace_betas(kB1, kB2, tilted_pi1_bloch(s, X_AXIS, Y_AXIS, d),
                           weak_prefactor(eps, g))

    mean_a, se_a = _mean_and_error(beta_a)
    mean_b, se_b = _mean_and_error(beta_b)
    return McSummary(
        mean_beta_a=mean_a,
        mean_beta_b=mean_b,
        sample_count=samples,
        std_error_a=se_a,
        std_error_b=se_b,
        seed=int(seed),
        mean_trace_beta_a=float(np.mean(trace_a)),
        mean_trace_beta_b=float(np.mean(trace_b)),
    )
