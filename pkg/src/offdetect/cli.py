"""Command-line entry points: run, export-features, sweep, inspect-model.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .errors import DataError, NumericError
from .evaluation import format_pct, render_report, sweep_control_parameter, sweep_csv_lines
from .experiment import (
    ExperimentConfig,
    RksSpec,
    build_pipeline,
    export_feature_lines,
    load_corpora,
    parse_config,
    run_experiment,
)
from .model_io import load_model

__all__ = ["main", "entrypoint"]

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="offdetect", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_config_opts(p):
        p.add_argument("--config", required=True, help="experiment config file")
        p.add_argument("--seed", type=int, default=None, help="override the training seed")
        p.add_argument("--out", default=None, help="override the output directory")

    p_run = sub.add_parser("run", help="train, evaluate, and write report/model/manifest")
    add_config_opts(p_run)

    p_export = sub.add_parser("export-features", help="dump per-tweet feature vectors")
    add_config_opts(p_export)

    p_sweep = sub.add_parser("sweep", help="repeat runs over C or map dimension")
    add_config_opts(p_sweep)
    p_sweep.add_argument("--sweep-C", dest="sweep_c", default=None,
                         help="comma-separated control-parameter values")
    p_sweep.add_argument("--sweep-dim", dest="sweep_dim", default=None,
                         help="comma-separated map output dimensions")

    p_inspect = sub.add_parser("inspect-model", help="describe a saved model file")
    p_inspect.add_argument("model", help="path to a model file")
    return parser


def _load_config(args) -> ExperimentConfig:
    cfg = parse_config(args.config)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    if args.out is not None:
        cfg = replace(cfg, out_dir=Path(args.out))
    return cfg


def _parse_values(raw: str, convert, what: str) -> list:
    values = []
    for piece in raw.split(","):
        piece = piece.strip()
        if not piece:
            continue
        try:
            values.append(convert(piece))
        except ValueError:
            raise UsageError(f"invalid {what} value {piece!r}") from None
    if not values:
        raise UsageError(f"empty {what} list")
    return values


def _cmd_run(args) -> int:
    cfg = _load_config(args)
    result = run_experiment(cfg)
    _, text = render_report([(cfg.name, result.report)])
    sys.stdout.write(text)
    sys.stdout.write(f"artifacts written to {cfg.out_dir}\n")
    return EXIT_OK


def _cmd_export(args) -> int:
    cfg = _load_config(args)
    lines = export_feature_lines(cfg)
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    dest = out_dir / "features.txt"
    dest.write_text("".join(line + "\n" for line in lines), encoding="utf-8")
    sys.stdout.write(f"{len(lines)} feature rows written to {dest}\n")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    if bool(args.sweep_c) == bool(args.sweep_dim):
        raise UsageError("sweep needs exactly one of --sweep-C or --sweep-dim")
    cfg = _load_config(args)
    cfg.check_inputs_exist()
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    from .learn import FeatureMatrix
    from .rks import median_heuristic_sigma, sample_map, transform

    train_corpus, test_corpus = load_corpora(cfg)
    pipeline = build_pipeline(cfg, [train_corpus, test_corpus])

    if args.sweep_c:
        featurize = pipeline.featurize
        if cfg.rks is not None:
            train_raw = pipeline.featurize(train_corpus)
            sigma = cfg.rks.sigma
            if sigma is None:
                sigma = median_heuristic_sigma(train_raw.values, seed=cfg.rks.seed)
            rks_map = sample_map(train_raw.dim, cfg.rks.dim, sigma, cfg.rks.seed)

            def featurize(corpus):
                raw = pipeline.featurize(corpus)
                return FeatureMatrix(values=transform(rks_map, raw.values), ids=raw.ids)

        c_values = _parse_values(args.sweep_c, float, "C")
        rows = sweep_control_parameter(
            train_corpus, test_corpus, featurize, c_values,
            epochs=cfg.svm_epochs, seed=cfg.seed,
        )
        lines = sweep_csv_lines(rows, value_name="C")
        dest = out_dir / "sweep_C.csv"
    else:
        dims = _parse_values(args.sweep_dim, int, "dimension")
        rows = []
        for dim in dims:
            spec = cfg.rks or RksSpec(dim=dim)
            run_cfg = replace(cfg, rks=replace(spec, dim=dim))
            run_cfg.validate()
            result = run_experiment(run_cfg, write_files=False)
            rows.append((float(dim), result.report.accuracy))
        lines = sweep_csv_lines(rows, value_name="D")
        dest = out_dir / "sweep_dim.csv"

    dest.write_text("".join(line + "\n" for line in lines), encoding="utf-8")
    for line in lines:
        sys.stdout.write(line.replace(",", "\t") + "\n")
    sys.stdout.write(f"sweep table written to {dest}\n")
    return EXIT_OK


def _cmd_inspect(args) -> int:
    from .learn import GnbModel, LinearModel

    try:
        with open(args.model, "rb") as fh:
            model = load_model(fh)
    except OSError as exc:
        raise DataError(f"cannot read model file: {exc}") from exc
    if isinstance(model, LinearModel):
        sys.stdout.write(f"kind: {model.kind}\n")
        sys.stdout.write(f"weights: {model.w.shape[0]}\n")
        sys.stdout.write(f"bias: {model.bias!r}\n")
        for key in sorted(model.hyper):
            sys.stdout.write(f"hyper.{key}: {model.hyper[key]}\n")
        if model.rks is not None:
            sys.stdout.write(
                f"map: {model.rks.d_in} -> {model.rks.dim_out} "
                f"(sigma={model.rks.sigma!r}, seed={model.rks.seed}, prng=numpy-pcg64)\n"
            )
        else:
            sys.stdout.write("map: none\n")
    elif isinstance(model, GnbModel):
        sys.stdout.write("kind: gnb\n")
        sys.stdout.write(f"features: {model.means.shape[1]}\n")
        sys.stdout.write(f"priors: OFF={format_pct(100 * model.priors[0])}% "
                         f"NOT={format_pct(100 * model.priors[1])}%\n")
        sys.stdout.write(f"var_floor: {model.var_floor!r}\n")
    return EXIT_OK


_COMMANDS = {
    "run": _cmd_run,
    "export-features": _cmd_export,
    "sweep": _cmd_sweep,
    "inspect-model": _cmd_inspect,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except DataError as exc:
        sys.stderr.write(f"data error: {exc}\n")
        return EXIT_DATA
    except NumericError as exc:
        sys.stderr.write(f"numeric failure: {exc}\n")
        return EXIT_NUMERIC


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
