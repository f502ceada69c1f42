"""Command line interface: run the benchmark, print slack bounds, or dump a
single demo cell."""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import bench, dgp, mixing
from .forecaster import fit_least_squares
from .methods_online import aci


def _parse_beta(text: str) -> mixing.MixingModel:
    """Parse a mixing-model spec: iid | geometric:c,rho | polynomial:c,kappa | table:v1,v2,..."""
    kind, _, rest = text.partition(":")
    kind = kind.strip().lower()
    if kind == "iid":
        return mixing.iid()
    values = [float(v) for v in rest.split(",")] if rest else []
    if kind == "geometric":
        if len(values) != 2:
            raise ValueError("geometric model needs two parameters: c,rho")
        return mixing.geometric(c=values[0], rho=values[1])
    if kind == "polynomial":
        if len(values) != 2:
            raise ValueError("polynomial model needs two parameters: c,kappa")
        return mixing.polynomial(c=values[0], kappa=values[1])
    if kind == "table":
        return mixing.from_table(values)
    raise ValueError(f"unknown beta model {text!r}")


def _default_jobs() -> int:
    env = os.environ.get("CONFORMAL_TS_JOBS")
    return int(env) if env else 1


def cmd_run(args) -> int:
    if args.config:
        config = bench.ExperimentConfig.from_json(args.config)
    else:
        config = bench.default_config()
    if args.seed is not None:
        config = bench.ExperimentConfig.from_dict({**config.to_dict(), "base_seed": args.seed})
    if args.replicates is not None:
        config = bench.ExperimentConfig.from_dict({**config.to_dict(), "replicates": args.replicates})
    records = bench.run_experiment(config, jobs=args.jobs)
    summary = bench.summarize(config, records)
    csv_path, json_path = bench.persist(records, summary, args.out)
    print(f"wrote {len(records)} records to {csv_path}")
    print(f"wrote summary to {json_path}")
    return 0


def cmd_bounds(args) -> int:
    model = _parse_beta(args.beta)
    report = mixing.slack_report(
        n_train=args.n_train,
        n_cal=args.n_cal,
        n_test=args.n_test,
        alpha=args.alpha,
        delta_cal=args.delta_cal,
        delta_test=args.delta_test,
        model=model,
        first_test_index=args.first_test_index,
    )
    d = report.to_dict()
    if args.json:
        print(json.dumps(d, indent=2, sort_keys=True))
        return 0
    print(f"beta model          {d['beta_model']}")
    print(f"split sizes         train={d['n_train']} cal={d['n_cal']} test={d['n_test']}")
    print(f"alpha               {d['alpha']}")
    if not report.feasible:
        print(f"INFEASIBLE          {d['failing_constraint']}")
        return 0
    print(f"eps_cal             {d['eps_cal']:.6f}  at (a, m, r) = {d['eps_cal_triple']}")
    print(f"eps_test            {d['eps_test']:.6f}  at (a, m, s) = {d['eps_test_triple']}")
    print(f"eps_train           {d['eps_train']:.3e}  (first test index {d['first_test_index']})")
    print(f"marginal bound      coverage >= {d['marginal_lower_bound']:.6f}"
          f"  (eta = {d['eta_marginal']:.6f})")
    print(f"empirical bound     coverage >= {d['empirical_lower_bound']:.6f}"
          f"  with confidence >= {d['empirical_confidence']:.3f}")
    return 0


def cmd_demo(args) -> int:
    config = bench.default_config(replicates=1, base_seed=args.seed)
    spec = next((p for p in config.processes if p.label == args.process), None)
    if spec is None:
        raise ValueError(f"unknown process {args.process!r}")
    n = config.lag + sum(config.sizes)
    series = dgp.generate(spec, n, args.seed)
    split = dgp.make_split(series, config.lag, config.sizes)
    model = fit_least_squares(split.X_train, split.y_train, intercept=config.intercept)
    intervals, state = aci(model, split, config.alpha, args.gamma)
    covered = intervals.covers(split.y_test)
    print("step,alpha_t,center,lower,upper,truth,covered")
    for j in range(len(intervals)):
        print(
            f"{j + 1},{state.alphas[j]:.6f},{intervals.center[j]:.6f},"
            f"{intervals.lower[j]:.6f},{intervals.upper[j]:.6f},{split.y_test[j]:.6f},{int(covered[j])}"
        )
    coverage, width = bench.evaluate(intervals, split.y_test)
    print(f"# coverage={coverage:.4f} mean_width={width:.4f} alpha_final={state.alpha_final:.6f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="conformal-ts", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run the full benchmark grid")
    p_run.add_argument("--config", help="JSON experiment config (defaults to the built-in grid)")
    p_run.add_argument("--out", default="results", help="output directory")
    p_run.add_argument("--seed", type=int, default=None, help="override the base seed")
    p_run.add_argument("--replicates", type=int, default=None, help="override the replicate count")
    p_run.add_argument("--jobs", type=int, default=_default_jobs(), help="parallel worker count")
    p_run.set_defaults(func=cmd_run)

    p_b = sub.add_parser("bounds", help="print the finite-sample slack report")
    p_b.add_argument("--n-train", type=int, default=300)
    p_b.add_argument("--n-cal", type=int, default=300)
    p_b.add_argument("--n-test", type=int, default=300)
    p_b.add_argument("--alpha", type=float, default=0.1)
    p_b.add_argument("--delta-cal", type=float, default=0.1)
    p_b.add_argument("--delta-test", type=float, default=0.1)
    p_b.add_argument("--first-test-index", type=int, default=None)
    p_b.add_argument("--beta", default="iid", help="iid | geometric:c,rho | polynomial:c,kappa | table:v1,v2,...")
    p_b.add_argument("--json", action="store_true", help="emit JSON instead of text")
    p_b.set_defaults(func=cmd_bounds)

    p_d = sub.add_parser("demo", help="run one adaptive-level cell and dump its trajectory")
    p_d.add_argument("--process", default="meanshift", help="ar1 | arma11 | meanshift | arch")
    p_d.add_argument("--gamma", type=float, default=0.005)
    p_d.add_argument("--seed", type=int, default=7)
    p_d.set_defaults(func=cmd_demo)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:
        print(json.dumps({"error": str(exc), "type": type(exc).__name__}), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
