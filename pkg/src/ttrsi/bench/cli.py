"""``ttbench``: run an experiment and write its records as CSV or JSON.

Exit status is 0 on success, 2 for invalid arguments or configuration and 3
when a computation fails numerically.
"""
import argparse
import json
import logging
import sys

import numpy as np

from ..exceptions import CapacityError, DegenerateSketchError, DomainError, ShapeError
from ..rsi import RsiConfig
from ..tt import load_tt, save_tt, tt_to_json
from . import experiments as ex
from .records import records_to_csv, records_to_json

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3

log = logging.getLogger("ttbench")


class ConfigError(Exception):
    pass


def _int_list(text):
    try:
        values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--chi-max", type=_int_list, help="target bond dimension(s), comma separated")
    common.add_argument("--eps-id", type=float, default=1e-14)
    common.add_argument("--oversample", type=_int_list, default=[0], help="oversampling p, comma separated")
    common.add_argument("--seed", type=int, default=0, help="first sketch seed")
    common.add_argument("--seeds", type=int, default=5, help="number of consecutive seeds")
    common.add_argument("--nbits", type=int, help="quantics digits")
    common.add_argument("--repeats", type=int, default=1, help="timing repeats per point (median)")
    common.add_argument("--out", help="output path (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--parallel", type=int, nargs="?", const=0, default=None, metavar="N",
                        help="run parameter points in N worker processes (timings become untrusted)")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="ttbench", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="experiment", required=True)

    p = sub.add_parser("psi2", parents=[common], help="|psi|^2 of a random spin-1 MPS and the Z deviation")
    p.add_argument("--n", type=int, default=20)
    p.add_argument("--chi-in", type=_int_list, default=[10])
    p.add_argument("--psi-seed", type=int, default=0)
    p.add_argument("--decay", type=float, default=0.5)

    p = sub.add_parser("gaussian", parents=[common], help="products of Gaussian QTTs")
    p.add_argument("--variant", choices=("separation", "spike", "multiproduct"), default="separation")
    p.add_argument("--mu1", type=float, default=0.4)
    p.add_argument("--mu2", type=float, default=0.6)
    p.add_argument("--sigma", type=float, default=0.15)
    p.add_argument("--chi-in", type=int, default=10)
    p.add_argument("--fold", choices=("full", "pairwise"), default="full")

    p = sub.add_parser("oscillatory", parents=[common], help="product of two oscillatory QTTs")
    p.add_argument("--chi-in", type=int, default=10)

    p = sub.add_parser("scaling", parents=[common], help="runtime against bond dimension")
    p.add_argument("--n", type=int, default=20)
    p.add_argument("--d", type=int, default=2)

    p = sub.add_parser("relu", parents=[common], help="ReLU of a sign-changing QTT")
    p.add_argument("--params", type=json.loads, default=None, help="JSON parameters of relu_target")

    p = sub.add_parser("product", parents=[common], help="RSI product of two TT JSON files")
    p.add_argument("a")
    p.add_argument("b")
    return parser


def _seeds(args):
    if args.seeds < 1:
        raise ConfigError("--seeds must be at least 1")
    return range(args.seed, args.seed + args.seeds)


def _parallel(args):
    if args.parallel is None:
        return False
    return args.parallel or True


def run(args):
    common = dict(parallel=_parallel(args))
    if args.repeats < 1:
        raise ConfigError("--repeats must be at least 1")
    name = args.experiment
    if name == "product":
        chi = (args.chi_max or [None])[0]
        if chi is None:
            raise ConfigError("product needs --chi-max")
        cfg = RsiConfig(chi_max=chi, eps_id=args.eps_id, oversample_p=args.oversample[0], seed=args.seed)
        rep = ex.rsi_product(load_tt(args.a), load_tt(args.b), cfg)
        if args.out:
            save_tt(rep.output, args.out)
        else:
            sys.stdout.write(tt_to_json(rep.output))
        log.info("product: ranks %s, k=%d, attempts=%d", rep.ranks, rep.k, rep.attempts)
        return None
    if name == "psi2":
        records = ex.exp_psi_squared(
            n=args.n, chi_list=args.chi_in, chi_out_list=args.chi_max or (2, 4, 6, 8, 10, 100),
            seeds=_seeds(args), psi_seed=args.psi_seed, eps_id=args.eps_id, p=args.oversample[0],
            decay=args.decay, repeats=args.repeats, **common)
    elif name == "gaussian":
        default = (15,) if args.variant == "multiproduct" else (4, 6, 8, 10, 12, 14)
        records = ex.exp_gaussian(
            variant=args.variant, mu1=args.mu1, mu2=args.mu2, sigma=args.sigma,
            chi_out_list=args.chi_max or default, seeds=_seeds(args), n_bits=args.nbits or 20,
            chi_in=args.chi_in, eps_id=args.eps_id, p=args.oversample[0], repeats=args.repeats,
            fold=args.fold, **common)
    elif name == "oscillatory":
        records = ex.exp_oscillatory(
            chi_out_list=args.chi_max or tuple(range(4, 44, 4)), p_list=args.oversample, seeds=_seeds(args),
            n_bits=args.nbits or 20, chi_in=args.chi_in, eps_id=args.eps_id, repeats=args.repeats, **common)
    elif name == "scaling":
        records = ex.exp_scaling(
            chi_list=args.chi_max or (16, 32, 64, 128), n=args.n, d=args.d, seeds=_seeds(args),
            eps_id=args.eps_id, repeats=args.repeats, **common)
        for method, (slope, chis) in ex.scaling_slopes(records).items():
            print(f"# {method} log-log slope {slope:.3f} over chi {chis}", file=sys.stderr)
    elif name == "relu":
        records = ex.exp_relu(
            chi_out_list=args.chi_max or (5, 10, 15, 20, 25, 30, 35, 40), seeds=_seeds(args),
            n_bits=args.nbits or 14, eps_id=args.eps_id, p=args.oversample[0], params=args.params,
            repeats=args.repeats, **common)
    else:  # pragma: no cover - argparse rejects unknown names
        raise ConfigError(f"unknown experiment {name}")
    return records


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    try:
        records = run(args)
    except (DomainError, DegenerateSketchError, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"ttbench: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ConfigError, ShapeError, CapacityError, ValueError, TypeError, KeyError, OSError) as exc:
        print(f"ttbench: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if records is None:
        return EXIT_OK
    text = records_to_csv(records) if args.format == "csv" else records_to_json(records)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
