"""Command-line entry point: simulate, estimate, select-k, components, bench.

Exit codes: 0 success, 1 runtime or numerical failure, 2 usage error.
"""
import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import io
from .bench import BENCH_COLUMNS, MARKER_COLUMNS, MethodSpec, parse_grid, run_bench
from .cgl import fit_partition
from .covariance import empirical_covariance, has_unit_diagonal, similarity_matrix, standardize
from .errors import CglassoError
from .glasso import GlassoConfig, solve, threshold_components
from .hclust import LinkageMethod, agglomerate, cut_k
from .selection import (SelectKConfig, TheoryParams, banerjee_lambda, corollary_lambdas,
                        select_k, shared_corollary_lambda, theorem4_lambda)
from .partition import Partition
from .simgen import generate_precision, perturb_off_block, sample_mvn, truth_from_precision


class UsageError(Exception):
    pass


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _nonneg_float(text):
    value = float(text)
    if not value >= 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative number, got {text}")
    return value


def _fraction(text):
    value = float(text)
    if not 0 <= value <= 1:
        raise argparse.ArgumentTypeError(f"expected a value in [0, 1], got {text}")
    return value


def _linkage(text):
    try:
        return LinkageMethod.parse(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"unknown linkage {text!r}") from None


def _int_list(text):
    try:
        values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text}") from None
    if not values or min(values) < 1:
        raise argparse.ArgumentTypeError(f"expected positive integers, got {text}")
    return values


def _load_covariance(args, need_n=False):
    """Return (S, n, feature names) from --input or --cov."""
    if args.input:
        data = io.read_data_csv(args.input)
        x = standardize(data)
        return empirical_covariance(x), data.n, data.feature_names
    s = io.read_matrix_csv(args.cov)
    n = getattr(args, "n", None)
    if need_n and n is None:
        raise UsageError("--n is required with --cov for this lambda rule")
    return s, n, None


def _add_source(p, with_n=True):
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", help="data CSV (rows = observations); standardized first")
    src.add_argument("--cov", help="p x p covariance CSV, used as given")
    if with_n:
        p.add_argument("--n", type=_positive_int, help="sample size behind --cov")


def build_parser():
    parser = argparse.ArgumentParser(prog="cglasso", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", default=".", help="output directory")
    common.add_argument("--threads", type=_positive_int, default=1)
    common.add_argument("--dump-config", action="store_true",
                        help="print the resolved configuration as JSON before running")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[common], help="generate a truth bundle and data")
    p.add_argument("--p", type=_positive_int, required=True)
    blocks = p.add_mutually_exclusive_group(required=True)
    blocks.add_argument("--blocks", type=_int_list, help="comma-separated block sizes")
    blocks.add_argument("--k-blocks", type=_positive_int, help="number of equal blocks")
    p.add_argument("--sparsity", type=_fraction, required=True)
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--off-block-frac", type=_fraction, default=0.0)

    p = sub.add_parser("estimate", parents=[common], help="fit glasso or CGL")
    _add_source(p)
    p.add_argument("--method", choices=["glasso", "cgl"], required=True)
    p.add_argument("--linkage", type=_linkage, default=LinkageMethod.AVERAGE)
    kgroup = p.add_mutually_exclusive_group()
    kgroup.add_argument("--k", type=int)
    kgroup.add_argument("--select-k", action="store_true")
    p.add_argument("--k-max", type=_positive_int, default=10)
    p.add_argument("--t-repeats", type=_positive_int, default=10)
    lgroup = p.add_mutually_exclusive_group(required=True)
    lgroup.add_argument("--lambda", dest="lam", type=_nonneg_float)
    lgroup.add_argument("--lambda-rule", choices=["banerjee", "corollary", "theorem4"])
    p.add_argument("--alpha", type=float, default=0.05, help="Banerjee level")
    p.add_argument("--epsilon", type=float, default=1e-3, help="corollary backoff")
    p.add_argument("--tau", type=float, default=4.0)
    p.add_argument("--c2", type=float, default=1.0)
    p.add_argument("--alpha-incoherence", type=float, default=1.0)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--max-sweeps", type=_positive_int, default=500)

    p = sub.add_parser("select-k", parents=[common], help="choose the number of clusters")
    _add_source(p, with_n=False)
    p.add_argument("--k-max", type=_positive_int, required=True)
    p.add_argument("--t-repeats", type=_positive_int, default=10)
    p.add_argument("--linkage", type=_linkage, default=LinkageMethod.AVERAGE)

    p = sub.add_parser("components", parents=[common], help="threshold-graph components")
    _add_source(p, with_n=False)
    p.add_argument("--lambda", dest="lam", type=_nonneg_float, required=True)

    p = sub.add_parser("bench", parents=[common], help="lambda-path benchmark")
    p.add_argument("--truth-prefix", required=True,
                   help="directory (or path prefix) holding simulate outputs")
    p.add_argument("--methods", default="glasso,cgl")
    p.add_argument("--linkage", type=_linkage, default=LinkageMethod.AVERAGE)
    p.add_argument("--k", default="2", help="comma list of cluster counts; 'auto' selects K")
    p.add_argument("--lambda-grid", required=True, help="start:stop:count or comma list")
    p.add_argument("--replicates", type=_positive_int, default=20)
    p.add_argument("--n", type=_positive_int, help="sample size (default: from meta.json)")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--epsilon", type=float, default=1e-3)
    return parser


def _config_dict(args):
    out = {}
    for key, value in sorted(vars(args).items()):
        if isinstance(value, LinkageMethod):
            value = value.value
        out[key] = value
    return out


def cmd_simulate(args):
    if args.blocks:
        sizes = args.blocks
        if sum(sizes) != args.p:
            raise UsageError(f"--blocks sum to {sum(sizes)}, not --p {args.p}")
    else:
        if args.k_blocks > args.p:
            raise UsageError("--k-blocks exceeds --p")
        base, extra = divmod(args.p, args.k_blocks)
        sizes = [base + (1 if i < extra else 0) for i in range(args.k_blocks)]
    truth = generate_precision(sizes, args.sparsity, args.seed)
    if args.off_block_frac > 0:
        truth = perturb_off_block(truth, args.off_block_frac, args.seed)
    x = sample_mvn(truth, args.n, args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    io.write_matrix_csv(out / "X.csv", x, prefix="x")
    io.write_matrix_csv(out / "theta_true.csv", truth.theta_true)
    io.write_matrix_csv(out / "sigma_true.csv", truth.sigma_true)
    (out / "partition_true.json").write_text(truth.partition_true.to_json() + "\n")
    io.write_json(out / "meta.json", dict(truth.meta(), n=args.n, p=args.p))
    print(f"p={args.p} blocks={sizes} edges={len(truth.edge_set)} "
          f"theta_min={truth.theta_min:.4g} -> {out}")


def _lambdas_for(args, s, n, partition):
    """Per-cluster penalties for the chosen rule."""
    k = partition.k
    if args.lam is not None:
        return [args.lam] * k
    rule = args.lambda_rule
    if rule == "banerjee":
        return [banerjee_lambda(s, n, args.alpha)] * k
    if rule == "corollary":
        if args.method == "cgl":
            return corollary_lambdas(similarity_matrix(s), partition, args.epsilon)
        return [shared_corollary_lambda(similarity_matrix(s), partition, args.epsilon)] * k
    params = TheoryParams(alpha_incoherence=args.alpha_incoherence, tau=args.tau, c2=args.c2)
    if args.method == "glasso":
        return [theorem4_lambda(s.shape[0], n, params)] * k
    return [theorem4_lambda(len(c), n, params) for c in partition]


def cmd_estimate(args):
    rule = args.lambda_rule
    s, n, _ = _load_covariance(args, need_n=rule in ("banerjee", "theorem4"))
    p = s.shape[0]
    if rule == "banerjee" and not 0 < args.alpha < 1:
        raise UsageError("--alpha must lie in (0, 1)")
    if rule == "corollary" and not args.epsilon > 0:
        raise UsageError("--epsilon must be positive")
    if rule == "theorem4":
        try:
            TheoryParams(alpha_incoherence=args.alpha_incoherence, tau=args.tau, c2=args.c2)
        except (ValueError, CglassoError) as exc:
            raise UsageError(str(exc)) from None
    if args.method == "cgl" and args.k is None and not args.select_k:
        raise UsageError("cgl needs --k or --select-k")
    if args.k is not None and not 1 <= args.k <= p:
        raise UsageError(f"--k must lie in [1, {p}]")
    cfg = GlassoConfig(tol=args.tol, max_sweeps=args.max_sweeps)
    sim = similarity_matrix(s)
    if not has_unit_diagonal(s):
        print("note: covariance diagonal is not 1; input treated as unstandardized",
              file=sys.stderr)

    if args.select_k:
        k = select_k(sim, SelectKConfig(range(1, min(args.k_max, p) + 1), args.t_repeats,
                                        args.linkage, args.seed)).chosen_k
    else:
        k = args.k if args.k is not None else 1
    if args.method == "cgl":
        partition = cut_k(agglomerate(sim, args.linkage), k)
        lambdas = _lambdas_for(args, s, n, partition)
        fit = fit_partition(s, partition, lambdas, cfg)
        payload, theta = fit.to_dict(), fit.theta
        n_clusters, converged = partition.k, fit.converged
        objective, kkt = fit.objective, fit.kkt_residual
    else:
        partition = cut_k(agglomerate(sim, LinkageMethod.SINGLE), k)
        lam = _lambdas_for(args, s, n, partition)[0]
        fit = solve(s, lam, cfg)
        payload, theta = fit.to_dict(), fit.theta
        payload["lambda"] = lam
        n_clusters, converged = fit.blocks.k, fit.converged
        objective, kkt = fit.objective, fit.kkt_residual

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    io.write_json(out / "network.json", payload)
    io.write_edges_csv(out / "edges.csv", theta)
    n_edges = int(np.count_nonzero(np.triu(theta, 1)))
    print(f"method={args.method} clusters={n_clusters} edges={n_edges} "
          f"objective={objective:.10g} kkt_residual={kkt:.3g} converged={converged}")
    if not converged:
        print("error: solver did not converge", file=sys.stderr)
        return 1
    return 0


def cmd_select_k(args):
    s, _, _ = _load_covariance(args)
    p = s.shape[0]
    if args.k_max > p:
        raise UsageError(f"--k-max {args.k_max} exceeds p={p}")
    cfg = SelectKConfig(range(1, args.k_max + 1), args.t_repeats, args.linkage, args.seed)
    try:
        result = select_k(similarity_matrix(s), cfg)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    io.write_table(out / "select_k.csv", ["k", "m_k", "s_k"], result.table)
    print(result.chosen_k)


def cmd_components(args):
    s, _, _ = _load_covariance(args)
    partition = threshold_components(s, args.lam)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "components.json").write_text(partition.to_json() + "\n")
    print(partition.k)


def _truth_file(prefix, name):
    base = Path(prefix)
    return base / name if base.is_dir() else Path(str(prefix) + name)


def cmd_bench(args):
    try:
        grid = parse_grid(args.lambda_grid)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    if not methods or any(m not in ("glasso", "cgl") for m in methods):
        raise UsageError(f"--methods must list glasso and/or cgl, got {args.methods!r}")
    ks = [v.strip() for v in args.k.split(",") if v.strip()]
    specs = []
    for m in methods:
        if m == "glasso":
            specs.append(MethodSpec("glasso"))
            continue
        for k in ks:
            if k != "auto" and (not k.isdigit() or int(k) < 1):
                raise UsageError(f"bad --k entry {k!r}")
            specs.append(MethodSpec("cgl", args.linkage, k if k == "auto" else int(k)))

    theta = io.read_matrix_csv(_truth_file(args.truth_prefix, "theta_true.csv"))
    partition = Partition.from_json(_truth_file(args.truth_prefix, "partition_true.json").read_text())
    meta = io.read_json(_truth_file(args.truth_prefix, "meta.json"))
    n = args.n or meta.get("n")
    if not n:
        raise UsageError("--n missing and meta.json has no n")
    truth = truth_from_precision(theta, partition, meta.get("seed", 0))
    rows, markers = run_bench(truth, int(n), specs, grid, args.replicates, args.seed,
                              args.alpha, args.epsilon, args.threads)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    io.write_table(out / "bench.csv", BENCH_COLUMNS, rows)
    io.write_table(out / "bench_markers.csv", MARKER_COLUMNS, markers)
    print(f"{len(rows)} rows over {len(specs)} methods x {len(grid)} lambdas x "
          f"{args.replicates} replicates -> {out / 'bench.csv'}")


COMMANDS = {
    "simulate": cmd_simulate,
    "estimate": cmd_estimate,
    "select-k": cmd_select_k,
    "components": cmd_components,
    "bench": cmd_bench,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.dump_config:
        print(json.dumps(_config_dict(args), sort_keys=True))
    try:
        status = COMMANDS[args.command](args)
    except UsageError as exc:
        parser.error(str(exc))
    except (CglassoError, ValueError, np.linalg.LinAlgError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return status or 0


if __name__ == "__main__":
    sys.exit(main())
