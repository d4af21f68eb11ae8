"""Command-line entry point.

Exit codes: 0 success, 2 configuration error, 3 run finished with failed
sweep points.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .exact_solver import lowest_eigenpairs
from .experiments import (
    ConfigError,
    _build_hamiltonian,
    _model_for_point,
    Task,
    load_config,
    run_experiment,
    summarize,
)


def _add_run_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", required=True, help="experiment config (YAML)")
    parser.add_argument("--seed", type=int, default=None, help="override the config seed")
    parser.add_argument("--threads", type=int, default=1, help="worker processes")
    parser.add_argument("--out", default=None, help="override the config output path")
    parser.add_argument(
        "--force-large", action="store_true", help="allow state-vector runs beyond 16 qubits"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="entvqe", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    for name, summary in (
        ("run", "run every sweep point of an experiment config"),
        ("rg", "run an RG-statistics experiment (rg_stats diagnostics)"),
        ("gradvar", "run a gradient-variance experiment (gradvar diagnostics)"),
    ):
        _add_run_flags(sub.add_parser(name, help=summary))

    p_sum = sub.add_parser("summarize", help="summarize results files")
    p_sum.add_argument("files", nargs="+", help="results and spectra files")
    p_sum.add_argument("--out", default=None, help="write the summary here instead of stdout")
    p_sum.add_argument("--force", action="store_true", help="allow mixed experiment ids")

    p_exact = sub.add_parser("exact", help="print exact reference energies for a config's model")
    p_exact.add_argument("--config", required=True)
    p_exact.add_argument("--k", type=int, default=4, help="number of eigenvalues")
    return parser


def _cmd_run(args: argparse.Namespace, required_diags: tuple[str, ...] = ()) -> int:
    config = load_config(args.config)
    for diag in required_diags:
        if diag not in config.diagnostics:
            raise ConfigError("diagnostics", f"this subcommand needs the {diag!r} diagnostic")
    outcome = run_experiment(
        config,
        seed=args.seed,
        threads=args.threads,
        out=args.out,
        force_large=args.force_large,
    )
    print(f"wrote {outcome.n_rows} rows to {outcome.rows_path}")
    if outcome.spectra_path:
        print(f"wrote spectra to {outcome.spectra_path}")
    if outcome.n_failed:
        print(f"{outcome.n_failed} point(s) failed", file=sys.stderr)
        return 3
    return 0


def _cmd_summarize(args: argparse.Namespace) -> int:
    text = summarize(args.files, force=args.force)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_exact(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    values = config.sweep["values"] if config.sweep["axis"] != "layers" else [None]
    for index, value in enumerate(values):
        task = Task(index, value, None, None)
        params, desc = _model_for_point(config, task)
        if isinstance(params, dict):
            raise ConfigError("model.kind", "exact energies of disorder ensembles are per-sample")
        reference = lowest_eigenpairs(_build_hamiltonian(config.model["kind"], params), k=args.k)
        energies = " ".join(f"{e:.12f}" for e in reference.energies)
        label = "" if value is None else f" {config.sweep['axis']}={value}"
        print(f"{config.model['kind']}{label} [{desc}]: {energies}")
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    np.seterr(all="raise", under="ignore")
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "rg":
            return _cmd_run(args, required_diags=("rg_stats",))
        if args.command == "gradvar":
            return _cmd_run(args, required_diags=("gradvar",))
        if args.command == "summarize":
            return _cmd_summarize(args)
        return _cmd_exact(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
