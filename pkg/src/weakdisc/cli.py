"""
Command-line front end.

    weakdisc verify [--quick] [--seed N]
    weakdisc sweep  [--config PATH] [--format csv|jsonl] [--out PATH] [--seed N] [--workers K]
    weakdisc mc-beta [--config PATH] ...
    weakdisc idp    [--config PATH] ...

Exit codes: 0 success, 1 invariant failure, 2 config error, 3 I/O error.
"""
import argparse
import math
import sys
import warnings

from . import __version__
from .config import ConfigError, ExperimentConfig, load_config
from .discrimination import idp_limit_eta
from .emit import FORMATS, emit, metadata
from .imperfections import mc_average_beta
from .sweep import run_sweep, sweep_points
from .verify import run_verify

EXIT_OK = 0
EXIT_INVARIANT = 1
EXIT_CONFIG = 2
EXIT_IO = 3

MC_FIELDS = (
    "eps", "g", "delta_f_mag", "samples", "seed",
    "mean_beta_a", "mean_beta_b", "std_error_a", "std_error_b",
    "mean_trace_beta_a", "mean_trace_beta_b",
)
IDP_FIELDS = ("eta_re", "eta_im", "overlap", "p_idp")

_SEED_MAX = 2**64 - 1


def _seed(text):
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer, got {text!r}") from None
    if not 0 <= value <= _SEED_MAX:
        raise argparse.ArgumentTypeError("seed must lie in [0, 2^64 - 1]")
    return value


def _workers(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("workers must be >= 1")
    return value


class _Parser(argparse.ArgumentParser):
    # usage errors are configuration errors
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser():
    parser = _Parser(prog="weakdisc", description=__doc__.split("\n\n")[0].strip())
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    common = _Parser(add_help=False)
    common.add_argument("--seed", type=_seed, help="RNG seed (overrides the config)")
    common.add_argument("--quick", action="store_true", help="reduced sample counts")

    output = _Parser(add_help=False)
    output.add_argument("--config", help="JSON experiment configuration")
    output.add_argument("--format", choices=FORMATS, default="csv")
    output.add_argument("--out", help="output path (default: standard output)")
    output.add_argument("--workers", type=_workers, default=1)

    sub.add_parser("verify", parents=[common], help="run the invariant suite")
    sub.add_parser("sweep", parents=[common, output], help="parameter sweep to CSV/JSON lines")
    sub.add_parser("mc-beta", parents=[common, output], help="single-point Monte Carlo of beta")
    sub.add_parser("idp", parents=[common, output], help="IDP bound for the configured eta values")
    return parser


def _config(args):
    config = load_config(args.config) if args.config else ExperimentConfig()
    if args.seed is not None:
        config = config.with_param("seed", args.seed)
    if args.quick:
        config = config.with_param("samples", min(config.samples, 1000))
    return config


def _cmd_verify(args):
    return run_verify(quick=args.quick, seed=args.seed or 0)


def _cmd_sweep(args):
    config = _config(args)
    rows = run_sweep(config, workers=args.workers)
    emit(rows, args.format, args.out, metadata(config.seed))
    return EXIT_OK


def _cmd_mc_beta(args):
    config = _config(args)
    mc = mc_average_beta(config.eps, config.g, config.delta_f_mag, config.samples, config.seed,
                         workers=args.workers)
    row = {"eps": config.eps, "g": config.g, "delta_f_mag": config.delta_f_mag,
           "samples": mc.sample_count, "seed": mc.seed,
           "mean_beta_a": mc.mean_beta_a, "mean_beta_b": mc.mean_beta_b,
           "std_error_a": mc.std_error_a, "std_error_b": mc.std_error_b,
           "mean_trace_beta_a": mc.mean_trace_beta_a, "mean_trace_beta_b": mc.mean_trace_beta_b}
    emit([row], args.format, args.out, metadata(config.seed), MC_FIELDS)
    return EXIT_OK


def _cmd_idp(args):
    config = _config(args)
    rows = []
    for point in sweep_points(config):
        eta = point.eta
        rows.append({"eta_re": eta.real, "eta_im": eta.imag,
                     "overlap": 1.0 / math.sqrt(1 + 2 * abs(eta) ** 2),
                     "p_idp": idp_limit_eta(eta)})
    emit(rows, args.format, args.out, metadata(config.seed), IDP_FIELDS)
    return EXIT_OK


COMMANDS = {"verify": _cmd_verify, "sweep": _cmd_sweep, "mc-beta": _cmd_mc_beta, "idp": _cmd_idp}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_CONFIG
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")  # flags travel in the data, not on stderr
            return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        # physics preconditions violated by a single-point command
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
