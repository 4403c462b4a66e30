"""
Self-check suite behind ``weakdisc verify``.

Each check exercises one property of one module against an independent
route (exact 4x4 evolution, direct traces, sampling) and reports the worst
deviation seen.  ``run_verify`` prints a pass/fail table and returns the
process exit status.
"""
import math
import sys
import warnings
from dataclasses import dataclass

import numpy as np

from . import discrimination as disc
from . import imperfections as imp
from . import qubit as qa
from . import weak as wm
from .exceptions import PovmPositivityWarning

MODULES = ("qubit_algebra", "weak_measurement", "discrimination", "error_analysis")


@dataclass
class Check:
    name: str
    module: str
    fn: object


@dataclass
class CheckResult:
    name: str
    module: str
    passed: bool
    detail: str


CHECKS = []


def check(module, name):
    def register(fn):
        CHECKS.append(Check(name, module, fn))
        return fn
    return register


def _random_ball(rng, n):
    v = rng.normal(size=(n, 3))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    return v * rng.uniform(size=(n, 1)) ** (1 / 3)


def _random_unit(rng, n):
    v = rng.normal(size=(n, 3))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def _grid(quick):
    n = 8 if quick else 20
    return np.geomspace(1e-3, 1.0, n), np.linspace(0.01, math.pi / 2, n)


# -- qubit_algebra -----------------------------------------------------------

@check("qubit_algebra", "bloch round trip and purity")
def _roundtrip(quick, rng):
    worst = 0.0
    for v in _random_ball(rng, 100 if quick else 1000):
        rho = qa.bloch_to_density(v)
        worst = max(worst, np.max(np.abs(qa.density_to_bloch(rho) - v)),
                    abs(np.trace(rho @ rho).real - 0.5 * (1 + v @ v)))
    return worst <= 1e-12, f"max error {worst:.2e}"


@check("qubit_algebra", "tensor mixed product and partial trace")
def _tensor(quick, rng):
    worst = 0.0
    for _ in range(20 if quick else 200):
        a, b, c, d = (rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)) for _ in range(4))
        worst = max(worst, np.max(np.abs(qa.tensor(a, b) @ qa.tensor(c, d) - qa.tensor(a @ c, b @ d))))
        rho = qa.bloch_to_density(_random_ball(rng, 1)[0])
        worst = max(worst, np.max(np.abs(qa.partial_trace_A(qa.tensor(a, rho)) - np.trace(a) * rho)))
    return worst <= 1e-12, f"max error {worst:.2e}"


# -- weak_measurement --------------------------------------------------------

@check("weak_measurement", "postselection probabilities vs exact evolution")
def _probs(quick, rng):
    worst = 0.0
    etas, gs = _grid(quick)
    for eta in etas:
        for g in gs:
            o1, o2 = wm.protocol_outcomes(eta, g)
            lam_psi2, lam_psi1 = wm.postselection_probs(eta, g)
            worst = max(worst, abs(o1.success_prob - lam_psi1), abs(o2.success_prob - lam_psi2))
    return worst <= 1e-12, f"max error {worst:.2e}"


@check("weak_measurement", "pointer overlap vs exact evolution")
def _overlap(quick, rng):
    worst = 0.0
    etas, gs = _grid(quick)
    for eta in etas:
        for g in gs:
            o1, o2 = wm.protocol_outcomes(eta, g)
            exact = math.sqrt(max(0.0, np.trace(o1.pointer_state @ o2.pointer_state).real))
            worst = max(worst, abs(exact - wm.pointer_overlap(eta, g)))
    return worst <= 1e-12, f"max error {worst:.2e}"


@check("weak_measurement", "probability conservation over both outcomes")
def _conservation(quick, rng):
    worst = 0.0
    for _ in range(50 if quick else 300):
        kA, kB = _random_ball(rng, 2)
        f, n = _random_unit(rng, 2)
        U = wm.coupling_unitary(rng.uniform(0, math.pi), n)
        rA, rB = qa.bloch_to_density(kA), qa.bloch_to_density(kB)
        yes = wm.evolve_postselect(rA, rB, U, f)
        no = wm.evolve_postselect(rA, rB, U, f, complement=True)
        total = qa.partial_trace_A(wm.evolve_joint(rA, rB, U))
        mix = yes.success_prob * yes.pointer_state + no.success_prob * no.pointer_state
        worst = max(worst, abs(yes.success_prob + no.success_prob - 1), np.max(np.abs(mix - total)))
    return worst <= 1e-12, f"max error {worst:.2e}"


@check("weak_measurement", "update-coefficient reconstruction vs exact evolution")
def _coeffs(quick, rng):
    worst = 0.0
    count = 100 if quick else 1000
    for _ in range(count):
        kA, kB = _random_ball(rng, 2)
        f, n = _random_unit(rng, 2)
        g = rng.uniform(0, math.pi)
        try:
            out = wm.evolve_postselect(qa.bloch_to_density(kA), qa.bloch_to_density(kB),
                                       wm.coupling_unitary(g, n), f)
        except wm.DegeneratePostselectionError:
            continue
        rebuilt = wm.updated_pointer_bloch(kA, kB, f, n, g)
        worst = max(worst, np.max(np.abs(rebuilt - qa.density_to_bloch(out.pointer_state))))
    return worst <= 1e-10, f"max error {worst:.2e} over {count} configurations"


@check("weak_measurement", "pointer pair separation exceeds source separation")
def _amplification(quick, rng):
    ratios = []
    for eta, g in [(1e-4, 0.01), (1e-3, 0.05), (1e-3, 0.1), (1e-2, 0.2)]:
        pair = wm.make_state_pair(eta)
        src = np.linalg.norm(qa.pure_to_bloch(pair.psi1) - qa.pure_to_bloch(pair.psi2))
        o1, o2 = wm.protocol_outcomes(eta, g)
        ptr = np.linalg.norm(qa.density_to_bloch(o1.pointer_state) - qa.density_to_bloch(o2.pointer_state))
        ratios.append(ptr / src)
    return min(ratios) > 1, f"min amplification {min(ratios):.3g}"


# -- discrimination ----------------------------------------------------------

@check("discrimination", "protocol never exceeds the IDP bound")
def _idp_bound(quick, rng):
    worst = -math.inf
    etas = np.geomspace(1e-4, 0.5, 10 if quick else 40)
    gs = np.linspace(1e-3, math.pi - 1e-3, 10 if quick else 60)
    for eta in etas:
        for g in gs:
            worst = max(worst, disc.overall_success_exact(eta, g) - disc.idp_limit_eta(eta))
    return worst <= 1e-12, f"max excess {worst:.2e}"


@check("discrimination", "weak coupling recovers the IDP bound")
def _recovery(quick, rng):
    ratio = disc.overall_success_exact(1e-3, 1e-2) / disc.idp_limit_eta(1e-3)
    return ratio >= 0.99, f"p/p_max = {ratio:.6f} at eta=1e-3, g=1e-2"


@check("discrimination", "half of the IDP bound at g = pi/4")
def _half(quick, rng):
    worst = max(abs(disc.overall_success_exact(e, math.pi / 4) - 0.5 * disc.idp_limit_eta(e))
                for e in np.geomspace(1e-4, 2, 30))
    return worst <= 1e-12, f"max error {worst:.2e}"


@check("discrimination", "POVM completeness, positivity and unambiguity at zero deviation")
def _povms(quick, rng):
    worst_complete = worst_cross = worst_neg = 0.0
    for eps in (1e-3, 1e-2):
        kA = imp.source_blochs(eps)
        povm = disc.povm_conventional(eps)
        r = disc.discriminate(*(qa.bloch_to_density(k) for k in kA), povm)
        worst_cross = max(worst_cross, r.conditional[0, 1], r.conditional[1, 0])
        worst_complete = max(worst_complete, povm.completeness_error())
        worst_neg = max(worst_neg, povm.negativity)
        for g in (0.05, 0.1):
            povm = disc.povm_weak(eps, g)
            r = disc.discriminate(*imp.weak_states(eps, g), povm) if eps <= g / 10 else None
            if r is not None:
                worst_cross = max(worst_cross, r.conditional[0, 1], r.conditional[1, 0])
            worst_complete = max(worst_complete, povm.completeness_error())
            worst_neg = max(worst_neg, povm.negativity)
    ok = worst_cross <= 1e-12 and worst_complete <= 1e-12 and worst_neg <= 1e-9
    return ok, f"cross {worst_cross:.1e}, completeness {worst_complete:.1e}, negativity {worst_neg:.1e}"


# -- error_analysis ----------------------------------------------------------

@check("error_analysis", "first-order pointer vectors vs exact evolution")
def _first_order(quick, rng):
    worst = 0.0
    for eps in (1e-4, 1e-3):
        for g in (0.05, 0.1, 0.2):
            approx = imp.perturbed_pointer_blochs(eps, g)
            exact = imp.exact_pointer_blochs(eps, g)
            bound = 5 * (eps + g * (2 * eps / g)) * g
            worst = max(worst, max(np.linalg.norm(a - b) for a, b in zip(approx, exact)) / bound)
    return worst <= 1, f"worst error / bound = {worst:.3g}"


@check("error_analysis", "coupling-axis deviation enters at second order")
def _delta_n(quick, rng):
    worst = 0.0
    for eps in (1e-4, 1e-3):
        for g in (0.05, 0.1, 0.2):
            base = imp.exact_pointer_blochs(eps, g)
            for direction in ((0, 1, 0), (0, 0, 1), (0, 1 / math.sqrt(2), 1 / math.sqrt(2))):
                dn = 10 * eps * np.array(direction, dtype=float)
                moved = imp.exact_pointer_blochs(eps, g, dn)
                change = max(np.linalg.norm(a - b) for a, b in zip(base, moved))
                worst = max(worst, change / (5 * (dn @ dn)))
    return worst <= 1, f"worst change / (5 |d_n|^2) = {worst:.3g}"


@check("error_analysis", "closed-form beta vs trace beta")
def _beta_agreement(quick, rng):
    worst_a = worst_b = 0.0
    for _ in range(1000 if quick else 10_000):
        eps = 10 ** rng.uniform(-4, -2)
        mag = 10 ** rng.uniform(-4, -2)
        theta = rng.uniform(0, 2 * math.pi)
        d = mag * np.array([math.cos(theta), math.sin(theta), 0.0])
        g = 2 * eps / rng.uniform(1e-3, 0.5)
        tol = 10 * max(eps, mag, g * g)
        ta = imp.beta_ratio(*imp.conventional_states(eps), disc.povm_conventional(eps, d)).beta
        worst_a = max(worst_a, abs(imp.beta_a_formula(eps, d) - ta) / ta / tol)
        s = 2 * eps / g
        kB = (-qa.Z_AXIS, -math.sqrt(1 - s * s) * qa.Z_AXIS + s * qa.X_AXIS)
        tb = imp.beta_ratio(*(qa.bloch_to_density(k) for k in kB), disc.povm_weak(eps, g, d)).beta
        worst_b = max(worst_b, abs(imp.beta_b_formula(eps, g, d) - tb) / tb / tol)
    return max(worst_a, worst_b) <= 1, f"worst rel. diff / tol: A {worst_a:.3g}, B {worst_b:.3g}"


@check("error_analysis", "beta lower bound 1/2")
def _beta_floor(quick, rng):
    lows = []
    for theta in np.linspace(0, 2 * math.pi, 73):
        u = np.array([math.cos(theta), math.sin(theta), 0.0])
        for mag in (1e-3, 1e-2):
            for eps in np.linspace(0, 2 * mag, 201):
                lows.append(imp.beta_a_formula(eps, mag * u))
                lows.append(imp.beta_b_formula(eps * 0.05 / 2, 0.05, mag * u))
    lo = min(lows)
    return abs(lo - 0.5) <= 1e-6 and lo >= 0.5 - 1e-9, f"grid minimum {lo:.9f}"


@check("error_analysis", "Monte-Carlo means match the averaged ratios")
def _mc(quick, rng):
    eps, g, mag = 1e-3, 0.05, 1e-3
    mc = imp.mc_average_beta(eps, g, mag, 10_000 if quick else 100_000, seed=20130224)
    ea = 1 + 2 * eps ** 2 / mag ** 2
    eb = 1 + (2 / g) ** 2 * 2 * eps ** 2 / mag ** 2
    za = abs(mc.mean_beta_a - ea) / mc.std_error_a
    zb = abs(mc.mean_beta_b - eb) / mc.std_error_b
    return max(za, zb) <= 3, f"z-scores A {za:.2f}, B {zb:.2f}"


@check("error_analysis", "weak route tolerates POVM error better")
def _dominance(quick, rng):
    bad = compared = 0
    for _ in range(2000 if quick else 20_000):
        g = rng.uniform(0.01, 0.2)
        eps = rng.uniform(0, g / 10)
        # |delta_f| of the same order as eps
        mag = eps * 10 ** rng.uniform(-1, 1)
        theta = rng.uniform(0, 2 * math.pi)
        d = mag * np.array([math.cos(theta), math.sin(theta), 0.0])
        a, b = imp.beta_a_formula(eps, d), imp.beta_b_formula(eps, g, d)
        if a > 1 and b > 1:
            compared += 1
            bad += b < a
    return bad == 0, f"{bad} violations in {compared} comparisons"


@check("error_analysis", "Monte-Carlo determinism across worker counts")
def _determinism(quick, rng):
    runs = [imp.mc_average_beta(1e-3, 0.05, 1e-3, 30_000, seed=7, workers=w) for w in (1, 4)]
    return runs[0] == runs[1], "identical" if runs[0] == runs[1] else "differs"


def run_checks(quick=False, seed=0, checks=None):
    results = []
    for c in checks if checks is not None else CHECKS:
        rng = np.random.default_rng(seed)
        try:
            with warnings.catch_warnings():
                # flagged POVMs are expected inside the sampled regimes
                warnings.simplefilter("ignore", PovmPositivityWarning)
                passed, detail = c.fn(quick, rng)
        except Exception as exc:  # a crashing check is a failed check
            passed, detail = False, f"raised {type(exc).__name__}: {exc}"
        results.append(CheckResult(c.name, c.module, bool(passed), detail))
    return results


def format_table(results):
    width = max(len(r.name) for r in results)
    lines = [f"{'module':<17} {'check':<{width}}  result  detail"]
    for r in results:
        lines.append(f"{r.module:<17} {r.name:<{width}}  {'PASS' if r.passed else 'FAIL':<6}  {r.detail}")
    failed = [r.name for r in results if not r.passed]
    lines.append(f"{len(results) - len(failed)}/{len(results)} checks passed")
    if failed:
        lines.append("failed: " + ", ".join(failed))
    return "\n".join(lines)


def run_verify(quick=False, seed=0, stream=None):
    """Run every check, print the table, return 0 if all pass and 1 otherwise."""
    results = run_checks(quick, seed)
    print(format_table(results), file=stream or sys.stdout)
    return 0 if all(r.passed for r in results) else 1
