"""Command line interface.  Every command prints one JSON object on stdout that
echoes its configuration and the library version; invalid input prints an
``{"error": ...}`` object and exits with status 2."""

import argparse
import csv
import json
import sys
from fractions import Fraction
from math import sqrt

import numpy as np

from . import __version__
from .design_builder import build_design, build_design_improved, build_mub_design
from .distinction import check_density, distinguish, mub_counterexample, random_orthogonal_pair
from .haar_moments import Monomial, haar_expectation, haar_sample
from .povm_sim import composed_distribution, sample_povm
from .quadrature import haar_rule, limit_moments, round_rule
from .verifier import approx_epsilon, check_conditions, frame_operator


class CliError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(message)


def _complex_rows(path):
    """Rows of complex numbers from JSON ([re, im] pairs) or CSV (2N reals per row)."""
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}")
    if path.endswith(".csv"):
        rows = [r for r in csv.reader(text.splitlines()) if r]
        vals = [[float(x) for x in r] for r in rows]
        if any(len(r) % 2 for r in vals):
            raise CliError("CSV rows must hold 2N numbers (re, im pairs)")
        return np.array([np.array(r[0::2]) + 1j * np.array(r[1::2]) for r in vals])
    data = json.loads(text)
    arr = np.asarray(data, dtype=float)
    if arr.shape[-1] != 2:
        raise CliError("JSON entries must be [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def load_density(path):
    rho = _complex_rows(path)
    if rho.ndim != 2:
        raise CliError("density matrix must be a 2-d array")
    return check_density(rho)


def load_state(path):
    psi = np.atleast_2d(_complex_rows(path))
    if psi.shape[0] != 1:
        raise CliError("state file must hold a single vector")
    return psi[0] / np.linalg.norm(psi[0])


def _ensemble(args):
    if args.variant == "main":
        return build_design(args.n, args.t, allow_small_n=args.allow_small_n)
    if args.variant == "improved":
        if args.epsilon is None:
            raise CliError("--epsilon is required for the improved variant")
        return build_design_improved(args.n, args.t, args.epsilon,
                                     allow_small_n=args.allow_small_n)
    return build_mub_design(args.n)


def cmd_build(args):
    ens = _ensemble(args)
    return {"spec": ens.to_spec(), "size": ens.size}


def cmd_verify(args):
    ens = _ensemble(args)
    rep = check_conditions(ens, epsilon=args.target_epsilon, mode=args.mode,
                           max_monomials=args.max_monomials, table=args.table,
                           threads=args.threads)
    return {"report": rep.to_dict()}


def cmd_distinguish(args):
    if args.seed is None and (args.baseline_trials or not (args.rho1 and args.rho2)):
        raise CliError("--seed is required for random state pairs and Haar baselines")
    ens = _ensemble(args)
    if args.rho1 and args.rho2:
        rho1, rho2 = load_density(args.rho1), load_density(args.rho2)
    elif args.rho1 or args.rho2:
        raise CliError("give both --rho1 and --rho2, or neither for a random orthogonal pair")
    else:
        rho1, rho2 = random_orthogonal_pair(ens.N, np.random.default_rng(args.seed))
    F, _ = frame_operator(ens, threads=args.threads)
    eps = approx_epsilon(F, ens.N, ens.t)
    rep = distinguish(ens, rho1, rho2, epsilon_hat=eps, baseline_trials=args.baseline_trials,
                      seed=args.seed, threads=args.threads)
    return {"report": rep.to_dict()}


def cmd_mub_check(args):
    ens = build_mub_design(args.n)
    F, residual = frame_operator(ens, 2)
    rho1, rho2, l1 = mub_counterexample(args.n)
    return {"epsilon": approx_epsilon(F, args.n, 2), "off_support_residual": residual,
            "counterexample_l1": l1, "expected_l1": 2 / (args.n + 1),
            "frobenius": sqrt(2), "size": ens.size}


def cmd_sample_povm(args):
    if args.state:
        psi = load_state(args.state)
    else:
        psi = haar_sample(1, args.n, np.random.default_rng(args.seed))[0]
    if len(psi) != args.n:
        raise CliError(f"state has dimension {len(psi)}, expected {args.n}")
    counts = sample_povm(psi, args.t, args.count, seed=args.seed)
    exact = composed_distribution(psi, args.t)
    f, g = np.nonzero(counts)
    tv = 0.5 * np.abs(counts / max(args.count, 1) - exact).sum()
    return {"shape": list(counts.shape),
            "counts": [[int(a), int(b), int(counts[a, b])] for a, b in zip(f, g)],
            "total_variation_to_exact": float(tv)}


def cmd_quadrature(args):
    rule = haar_rule(args.t)
    if args.n:
        rule = round_rule(rule, args.n)
    mom = limit_moments(args.t)
    err = max(abs(rule.moment(j) - m) for j, m in enumerate(mom))
    return {"rule": rule.to_dict(), "max_moment_error": err}


def cmd_haar_moment(args):
    val = haar_expectation(args.n, Monomial.parse(args.monomial))
    val = Fraction(val)
    return {"num": val.numerator, "den": val.denominator}


def _add_ensemble_args(p):
    p.add_argument("--variant", choices=["main", "improved", "mub"], default="main")
    p.add_argument("--n", type=int, required=True, help="dimension N")
    p.add_argument("--t", type=int, default=2, help="design order")
    p.add_argument("--epsilon", type=float, help="target accuracy (improved variant)")
    p.add_argument("--allow-small-n", action="store_true", help="permit N < 2t")
    p.add_argument("--threads", type=int, default=None, help="worker threads")


def make_parser():
    parser = _Parser(prog="tdesign", description="Approximate complex projective t-designs")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("build", help="construct an ensemble and print its specification")
    _add_ensemble_args(p)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("verify", help="check moment conditions and the frame operator")
    _add_ensemble_args(p)
    p.add_argument("--mode", choices=["full", "budgeted"], default="full")
    p.add_argument("--max-monomials", type=int, default=400)
    p.add_argument("--target-epsilon", type=float)
    p.add_argument("--table", action="store_true", help="include per-monomial values")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("distinguish", help="l1 distance of the POVM outcomes for two states")
    _add_ensemble_args(p)
    p.add_argument("--rho1", help="density matrix file (JSON or CSV)")
    p.add_argument("--rho2", help="density matrix file (JSON or CSV)")
    p.add_argument("--baseline-trials", type=int, default=0)
    p.add_argument("--seed", type=int, help="required unless both states are given and no baseline")
    p.set_defaults(func=cmd_distinguish)

    p = sub.add_parser("mub-check", help="mutually unbiased bases: 2-design check and counterexample")
    p.add_argument("--n", type=int, required=True, help="prime dimension")
    p.set_defaults(func=cmd_mub_check)

    p = sub.add_parser("sample-povm", help="simulate the two-stage measurement")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--t", type=int, default=2)
    p.add_argument("--state-file", "--state", dest="state", help="state vector file (JSON or CSV)")
    p.add_argument("--count", type=int, default=1000)
    p.add_argument("--seed", type=int, required=True)
    p.set_defaults(func=cmd_sample_povm)

    p = sub.add_parser("quadrature", help="Gauss rule for the limit amplitude law")
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--n", type=int, help="round weights to multiples of 1/N")
    p.set_defaults(func=cmd_quadrature)

    p = sub.add_parser("haar-moment", help="exact Haar expectation of a monomial")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--monomial", required=True, help='terms "i:c[,d]" separated by , or ;')
    p.set_defaults(func=cmd_haar_moment)
    return parser


def _dump(obj):
    return json.dumps(obj, sort_keys=True, default=_default)


def _default(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"cannot serialise {type(o).__name__}")


def main(argv=None):
    parser = make_parser()
    config = None
    try:
        args = parser.parse_args(argv)
        config = {k: v for k, v in vars(args).items() if k != "func"}
        result = args.func(args)
    except (CliError, ValueError, KeyError, IndexError, ZeroDivisionError) as exc:
        out = {"error": str(exc), "error_type": type(exc).__name__, "version": __version__}
        if config is not None:
            out["config"] = config
        print(_dump(out))
        return 2
    result["config"] = config
    result["version"] = __version__
    print(_dump(result))
    return 0


if __name__ == "__main__":
    sys.exit(main())
