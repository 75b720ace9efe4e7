"""
Command-line interface.

Exit codes: 0 success, 1 validation error, 2 numeric/domain error,
3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from . import __version__
from .asymptotics import large_system_point, secrecy_rate_deq_perfect
from .channel import SystemConfig
from .errors import NumericError, ValidationError
from .fdd import feedback_bits, feedback_bits_exact, regime_for, scaling_constant
from .harness.io import csv_text, emit_csv, emit_json, json_text, load_spec_file, write_meta
from .harness.montecarlo import ergodic_secrecy_rate_mc
from .harness.selftest import run_selftest
from .harness.sweep import RECIPES, recipe, run_many, run_sweep, with_overrides
from .precoder import optimal_regularizer
from .tdd import TddConfig, optimal_training_grid

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERIC, EXIT_IO = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_VALIDATION, f"{self.prog}: error: {message}\n")


def _common(p, trials=True):
    p.add_argument("--M", type=int, default=10, help="transmit antennas")
    p.add_argument("--K", type=int, default=10, help="users")
    p.add_argument("--rho-db", type=float, default=20.0, help="downlink SNR in dB")
    p.add_argument("--tau2", type=float, default=0.0, help="CSIT error variance")
    if trials:
        p.add_argument("--trials", type=int, default=1000)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--workers", type=int, default=1, help="threads for Monte Carlo trials")
    p.add_argument("--out", help="write results to this file instead of stdout")
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def build_parser():
    parser = _Parser(prog="rcisec", description=__doc__.splitlines()[1])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("deq", help="large-system secrecy rates at one operating point")
    _common(p, trials=False)
    p.add_argument("--beta", type=float, help="load K/M (overrides --M/--K)")
    p.add_argument("--xi", type=float, help="regularizer (default: perfect-CSIT optimum)")

    p = sub.add_parser("mc", help="ergodic Monte Carlo secrecy sum-rate")
    _common(p)

    p = sub.add_parser("fdd-bits", help="feedback bits and CSIT scaling for a target gap")
    _common(p, trials=False)
    p.add_argument("--beta", type=float)
    p.add_argument("--b", type=float, default=2.0, help="gap target factor, gap = log2(b) bits")

    p = sub.add_parser("tdd-train", help="optimal uplink training length")
    _common(p, trials=False)
    p.add_argument("--T", type=int, default=100, help="coherence interval")
    p.add_argument("--c", type=float, default=10.0, help="rho / rho_ul")
    p.add_argument("--q-ref-db", type=float, help="evaluate q at this SNR instead of --rho-db")

    p = sub.add_parser("sweep", help="run a figure recipe or a sweep config file")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--recipe", choices=RECIPES)
    g.add_argument("--spec", help="INI sweep description")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int, help="master seed (default 0, or the config file's)")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out")
    p.add_argument("--format", choices=("csv", "json"), default="csv")

    sub.add_parser("selftest", help="run the built-in invariant checks")
    return parser


def _emit_record(args, record):
    """Single-record output for the point commands."""
    if args.format == "json":
        text = json.dumps({k: (None if isinstance(v, float) and not math.isfinite(v) else v)
                           for k, v in record.items()}, indent=2) + "\n"
    else:
        keys = list(record)
        vals = [format(v, ".17g") if isinstance(v, float) else str(v) for v in record.values()]
        text = ",".join(keys) + "\n" + ",".join(vals) + "\n"
    _write(args.out, text)


def _write(path, text):
    if path:
        try:
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
    else:
        sys.stdout.write(text)


def _cmd_deq(args):
    if args.beta is not None:
        beta, K = args.beta, None
    else:
        cfg = SystemConfig.from_db(args.M, args.K, args.rho_db, args.tau2)
        beta, K = cfg.beta, cfg.K
    rho = 10.0 ** (args.rho_db / 10.0)
    pt = large_system_point(beta, rho, args.tau2, args.xi)
    rec = {
        "beta": beta, "rho_db": args.rho_db, "tau2": args.tau2, "xi": pt.xi, "g": pt.g,
        "rho_tilde": pt.rho_tilde, "xi_tilde": pt.xi_tilde,
        "sinr_deq": pt.sinr_intended_deq, "sinr_eve_deq": pt.sinr_eve_deq,
        "rate_per_user": pt.rate_per_user,
        "rate_per_user_perfect": secrecy_rate_deq_perfect(beta, rho),
    }
    if K is not None:
        rec["sum_rate"] = pt.sum_rate(K)
    _emit_record(args, rec)


def _cmd_mc(args):
    cfg = SystemConfig.from_db(args.M, args.K, args.rho_db, args.tau2)
    est = ergodic_secrecy_rate_mc(cfg, args.trials, args.seed, workers=args.workers)
    lo, hi = est.ci95
    _emit_record(args, {
        "M": cfg.M, "K": cfg.K, "rho_db": args.rho_db, "tau2": cfg.tau2,
        "xi": optimal_regularizer(cfg.beta, cfg.rho), "trials": est.trials,
        "mean": est.mean, "std_error": est.std_error, "ci95_low": lo, "ci95_high": hi,
        "sinr_mean": est.sinr_intended_mean, "sinr_eve_mean": est.sinr_eve_mean,
    })


def _cmd_fdd(args):
    beta = args.beta if args.beta is not None else args.K / args.M
    regime = regime_for(beta)
    B = feedback_bits(args.M, regime, args.rho_db, args.b)
    C = scaling_constant(regime, args.b)
    _emit_record(args, {
        "M": args.M, "beta": beta, "regime": regime.value, "rho_db": args.rho_db, "b": args.b,
        "gap_bits": math.log2(args.b), "C": C, "tau2": C / 10.0 ** (args.rho_db / 10.0),
        "B": B, "B_ceil": math.ceil(B - 1e-9),
        "B_exact": feedback_bits_exact(args.M, regime, args.rho_db, args.b),
    })


def _cmd_tdd(args):
    cfg = TddConfig.from_db(T=args.T, K=args.K, beta=args.K / args.M, rho_db=args.rho_db, c=args.c)
    sol = optimal_training_grid(cfg, q_reference_rho_db=args.q_ref_db)
    _emit_record(args, {
        "M": args.M, "K": args.K, "T": args.T, "c": args.c, "rho_db": args.rho_db,
        "q": sol.q, "t_opt_cubic": sol.t_opt_cubic, "t_opt_grid": sol.t_opt_grid,
        "t_opt_refined": sol.t_opt_refined, "rate_at_grid_opt": sol.rate_at_grid_opt,
        "cubic_fraction": sol.t_opt_cubic / args.T, "grid_fraction": sol.t_opt_grid / args.T,
    })


def _cmd_sweep(args):
    if args.recipe:
        result = run_many(recipe(args.recipe, trials=args.trials, seed=args.seed or 0),
                          workers=args.workers)
    else:
        spec = with_overrides(load_spec_file(args.spec), trials=args.trials,
                              master_seed=args.seed)
        result = run_sweep(spec, workers=args.workers)
    if args.format == "json":
        if args.out:
            emit_json(result, args.out)
        else:
            sys.stdout.write(json_text(result))
    elif args.out:
        emit_csv(result, args.out)
        write_meta(result, args.out)
    else:
        sys.stdout.write(csv_text(result))


def _cmd_selftest(args):
    return EXIT_OK if run_selftest() else EXIT_NUMERIC


COMMANDS = {"deq": _cmd_deq, "mc": _cmd_mc, "fdd-bits": _cmd_fdd, "tdd-train": _cmd_tdd,
            "sweep": _cmd_sweep, "selftest": _cmd_selftest}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        code = COMMANDS[args.command](args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK if code is None else code


if __name__ == "__main__":
    sys.exit(main())
