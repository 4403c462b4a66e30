"""Parameter sweeps producing one flat result row per point."""
import math
from concurrent.futures import ThreadPoolExecutor

from .discrimination import idp_limit_eta, overall_success_approx, overall_success_exact
from .exceptions import WeakDiscError
from .imperfections import mc_average_beta
from .weak import pointer_overlap, postselection_probs

INPUT_FIELDS = ("eta_re", "eta_im", "g", "eps", "delta_n_mag", "delta_f_mag", "samples", "seed")
OUTPUT_FIELDS = (
    "lambda1", "lambda2", "pointer_overlap", "p_exact", "p_approx", "p_idp",
    "mean_beta_a", "mean_beta_b", "std_error_a", "std_error_b",
)
#: Column order of every emitted row.
FIELDS = INPUT_FIELDS + OUTPUT_FIELDS + ("status",)


def evaluate_point(config):
    """
    Compute one result row.  Outputs whose preconditions fail are left as
    ``None`` and the reason is recorded in ``status`` as ``"skipped: ..."``.
    """
    row = {
        "eta_re": config.eta.real,
        "eta_im": config.eta.imag,
        "g": config.g,
        "eps": config.eps,
        "delta_n_mag": config.delta_n_mag,
        "delta_f_mag": config.delta_f_mag,
        "samples": config.samples,
        "seed": config.seed,
    }
    row.update(dict.fromkeys(OUTPUT_FIELDS))
    skipped = []

    def attempt(label, fn):
        try:
            return fn()
        except (WeakDiscError, ValueError) as exc:
            skipped.append(f"{label} ({exc})")
            return None

    eta, g = config.eta, config.g
    if not 0.0 <= g <= math.pi:
        skipped.append(f"all outputs (g={g!r} outside [0, pi])")
    else:
        row["lambda1"], row["lambda2"] = postselection_probs(eta, g)
        row["pointer_overlap"] = attempt("pointer_overlap", lambda: pointer_overlap(eta, g))
        row["p_exact"] = overall_success_exact(eta, g)
        row["p_approx"] = attempt("p_approx", lambda: overall_success_approx(eta, g))
        row["p_idp"] = idp_limit_eta(eta)
        mc = attempt("beta", lambda: mc_average_beta(
            config.eps, g, config.delta_f_mag, config.samples, config.seed))
        if mc is not None:
            row["mean_beta_a"] = mc.mean_beta_a
            row["mean_beta_b"] = mc.mean_beta_b
            row["std_error_a"] = mc.std_error_a
            row["std_error_b"] = mc.std_error_b
    row["status"] = "ok" if not skipped else "skipped: " + "; ".join(skipped)
    return row


def sweep_points(config):
    if config.sweep is None:
        return [config]
    return [config.with_param(config.sweep.param, v) for v in config.sweep.points()]


def run_sweep(config, workers=1):
    """Rows for every sweep point, in sweep order regardless of ``workers``."""
    points = sweep_points(config)
    if workers > 1 and len(points) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(evaluate_point, points))
    return [evaluate_point(p) for p in points]
