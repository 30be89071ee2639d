"""Command line entry point.

    spectrallab sample --dist '{"kind": "gaussian"}' --rows 50 --cols 20 --seed 7 --out a.txt
    spectrallab norm --in a.txt --method power --tol 1e-10
    spectrallab experiment run --config configs/bai_yin.json --out bai_yin.csv
    spectrallab experiment fit --in bai_yin.csv --quantile 0.9

Exit status: 0 on success (and a passing experiment), 1 when an experiment
exceeds its configured ceiling, 2 on a configuration or input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .distributions import EntryDistribution, sample_matrix
from .experiments import ConfigError, ExperimentConfig, fit_constant, records_from_csv, run_experiment
from .matrix import load_matrix, save_matrix
from .spectral import singular_values_full, spectral_norm

EXIT_OK, EXIT_CEILING, EXIT_CONFIG = 0, 1, 2


def _load_distribution(text: str) -> EntryDistribution:
    path = Path(text)
    if not text.lstrip().startswith("{") and path.is_file():
        text = path.read_text()
    return EntryDistribution.from_json(text)


def cmd_sample(args) -> int:
    dist = _load_distribution(args.dist)
    save_matrix(args.out, sample_matrix(dist, args.rows, args.cols, args.seed))
    return EXIT_OK


def cmd_norm(args) -> int:
    m = load_matrix(args.infile)
    if args.method == "power":
        res = spectral_norm(m, tol=args.tol, seed=args.seed)
        print(f"{res.value:.17g}")
        print(f"iterations={res.iterations} converged={res.converged} residual={res.residual:.3g}",
              file=sys.stderr)
    else:
        print(f"{singular_values_full(m)[0]:.17g}")
    return EXIT_OK


def cmd_experiment_run(args) -> int:
    cfg = ExperimentConfig.load(args.config)
    report = run_experiment(cfg, workers=args.threads)
    report.write_csv(args.out)
    out = {"experiment": cfg.experiment, "fitted_constant": report.fitted_constant,
           "pass": report.passed, "summary": report.summary}
    print(json.dumps(out, indent=2, default=float))
    return EXIT_OK if report.passed else EXIT_CEILING


def cmd_experiment_fit(args) -> int:
    records = records_from_csv(Path(args.infile).read_text())
    print(f"{fit_constant(records, args.quantile):.17g}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spectrallab", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="write a seeded random matrix")
    p.add_argument("--dist", required=True, help="distribution as JSON text or a path to a JSON file")
    p.add_argument("--rows", type=int, required=True)
    p.add_argument("--cols", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("norm", help="spectral norm of a matrix file")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--method", choices=("power", "full"), default="power")
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--seed", type=int, default=0, help="power iteration start vector seed")
    p.set_defaults(func=cmd_norm)

    p = sub.add_parser("experiment", help="run or summarize Monte Carlo experiments")
    esub = p.add_subparsers(dest="action", required=True)
    r = esub.add_parser("run", help="run a config and write the per-trial CSV")
    r.add_argument("--config", required=True)
    r.add_argument("--out", required=True)
    r.add_argument("--threads", type=int, default=1)
    r.set_defaults(func=cmd_experiment_run)
    f = esub.add_parser("fit", help="nearest-rank quantile of the ratios in a CSV report")
    f.add_argument("--in", dest="infile", required=True)
    f.add_argument("--quantile", type=float, default=1.0)
    f.set_defaults(func=cmd_experiment_fit)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (ConfigError, ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
