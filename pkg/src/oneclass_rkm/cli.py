"""Command-line entry point: ``oneclass-rkm {train,predict,benchmark,stats,sensitivity}``.

Exit codes: 0 success, 2 usage or data errors, 3 numerical failures. The
outcome of a statistical test never changes the exit code.

Every command writes ``<out>.run.json`` next to its main output with the
resolved configuration and seed. Data outputs contain no timestamps.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from ._base import read_model_document
from .benchmark import fit_final, run_benchmark
from .data_io import AUTO, SplitSpec, load_csv, read_feature_csv, split_train_test
from .errors import DataError, NumericalError, OneClassError, VersionMismatch
from .lsocsvm import LsocsvmModel
from .model_select import GridSpec, grid_search, sensitivity_grid, write_cv_table, write_sensitivity_csv
from .ocrkm import OcrkmModel
from .stats import rank_report, read_results_csv

log = logging.getLogger("oneclass_rkm")

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 2, 3


class StageError(Exception):
    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"{stage}: {cause}")
        self.stage = stage
        self.cause = cause


class _Stage:
    def __init__(self, name: str):
        self.name = name

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        if exc is not None and not isinstance(exc, StageError) and isinstance(exc, Exception):
            raise StageError(self.name, exc) from exc
        return False


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _grid_from(args) -> GridSpec:
    kwargs = {}
    for name in ("gamma_grid", "eta_grid", "sigma_grid", "C_grid"):
        value = getattr(args, name.lower(), None)
        if value is not None:
            kwargs[name] = value
    return GridSpec(**kwargs)


def _write_run_record(out: Path, command: str, args: argparse.Namespace, extra: dict | None = None) -> None:
    resolved = {
        k: (str(v) if isinstance(v, Path) else v)
        for k, v in sorted(vars(args).items())
        if k not in ("func", "verbose")
    }
    record = {"command": command, "version": __version__, "config": resolved}
    if extra:
        record.update(extra)
    Path(f"{out}.run.json").write_text(json.dumps(record, indent=1, sort_keys=True) + "\n", encoding="utf-8")


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0, help="base random seed (default 0)")
    p.add_argument("--folds", type=int, default=5, help="cross-validation folds (default 5)")
    p.add_argument("--target-label", default=AUTO, help="label treated as the target class (default: majority)")


def _add_grids(p: argparse.ArgumentParser) -> None:
    p.add_argument("--gamma-grid", type=_float_list, help="comma-separated gamma values (default 1e-5..1e5)")
    p.add_argument("--eta-grid", type=_float_list, help="comma-separated eta values (default 1e-5..1e5)")
    p.add_argument("--sigma-grid", type=_float_list, help="comma-separated sigma values (default 2^-5..2^5)")
    p.add_argument("--c-grid", dest="c_grid", type=_float_list, help="comma-separated C values (default 1e-5..1e5)")


def cmd_train(args) -> int:
    with _Stage("load"):
        data = load_csv(args.data, args.target_label)
    extra = {"target_label": data.target_label}
    if args.tune:
        with _Stage("tune"):
            cv = grid_search(data, _grid_from(args), args.model, args.folds, args.seed)
        config = cv.best_config
        write_cv_table(f"{args.out}.cv.csv", cv)
        extra.update(criterion=cv.criterion, best_config=config)
    else:
        if args.model == "ocrkm":
            missing = [n for n in ("gamma", "eta", "sigma") if getattr(args, n) is None]
            config = {"gamma": args.gamma, "eta": args.eta, "sigma": args.sigma}
        else:
            missing = [n for n in ("c", "sigma") if getattr(args, n) is None]
            config = {"C": args.c, "sigma": args.sigma}
        if missing:
            raise StageError("arguments", ValueError(
                "missing " + ", ".join("--" + m for m in missing) + " (or pass --tune)"))
    with _Stage("train"):
        model = fit_final(data, args.model, config)
    with _Stage("write"):
        model.save(args.out)
        _write_run_record(args.out, "train", args, extra)
    log.info("wrote %s (rho = %r)", args.out, model.rho)
    return EXIT_OK


def load_any_model(path):
    doc = read_model_document(path)
    kind = doc.get("model")
    cls = {"ocrkm": OcrkmModel, "lsocsvm": LsocsvmModel}.get(kind)
    if cls is None:
        raise VersionMismatch(f"{path}: unknown model kind {kind!r}")
    return cls.from_dict(doc)


def cmd_predict(args) -> int:
    with _Stage("load model"):
        model = load_any_model(args.model_file)
    with _Stage("load queries"):
        X = read_feature_csv(args.data, drop_last=args.has_labels)
    with _Stage("score"):
        if X.shape[0] == 0:
            scores, labels = np.zeros(0), np.zeros(0, dtype=int)
        else:
            scores = model.decision_scores(X)
            labels = np.where(scores >= 0.0, 1, -1)
    with _Stage("write"):
        with Path(args.out).open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["row_index", "score", "label"])
            for i, (s, lab) in enumerate(zip(scores, labels)):
                w.writerow([i, repr(float(s)), int(lab)])
        _write_run_record(args.out, "predict", args)
    return EXIT_OK


def cmd_benchmark(args) -> int:
    root = Path(args.data)
    with _Stage("load"):
        if root.is_dir():
            paths = sorted(root.glob("*.csv"))
        elif root.exists():
            paths = [root]
        else:
            raise FileNotFoundError(f"no such file or directory: {root}")
        datasets = []
        for p in paths:
            try:
                datasets.append(load_csv(p, args.target_label))
            except OneClassError as exc:
                log.warning("skipping %s: %s", p, exc)
        if not datasets:
            raise DataError(f"no usable datasets under {root}")
    kinds = args.models or [args.model]
    with _Stage("benchmark"):
        result = run_benchmark(datasets, kinds, _grid_from(args), args.reps, args.seed, args.folds)
    with _Stage("write"):
        result.write_csv(args.out)
        _write_run_record(args.out, "benchmark", args, {"targets": result.targets, "dropped": result.dropped})
    for name, why in result.dropped.items():
        log.warning("dropped %s (%s)", name, why)
    return EXIT_OK


def cmd_stats(args) -> int:
    with _Stage("load"):
        table = read_results_csv(args.results)
    with _Stage("statistics"):
        report = rank_report(table, args.f_critical)
    for line in report.verdict_lines():
        print(line)
    if args.out:
        with _Stage("write"):
            Path(f"{args.out}.md").write_text(report.to_markdown(), encoding="utf-8")
            Path(f"{args.out}.csv").write_text(report.to_csv(), encoding="utf-8")
            _write_run_record(args.out, "stats", args)
    return EXIT_OK


def cmd_sensitivity(args) -> int:
    with _Stage("load"):
        data = load_csv(args.data, args.target_label)
        train, test = split_train_test(data, SplitSpec(seed=args.seed, folds=args.folds))
    grid = _grid_from(args)
    with _Stage("sweep"):
        acc = sensitivity_grid(train, test, grid.eta_grid, grid.gamma_grid, args.sigma)
    with _Stage("write"):
        write_sensitivity_csv(args.out, grid.eta_grid, grid.gamma_grid, acc)
        _write_run_record(args.out, "sensitivity", args)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="oneclass-rkm", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="fit a model on the target rows of a dataset")
    p.add_argument("--data", type=Path, required=True)
    p.add_argument("--model", choices=("ocrkm", "lsocsvm"), default="ocrkm")
    p.add_argument("--gamma", type=float)
    p.add_argument("--eta", type=float)
    p.add_argument("--sigma", type=float)
    p.add_argument("--c", type=float)
    p.add_argument("--tune", action="store_true", help="grid-search the hyperparameters first")
    p.add_argument("--out", type=Path, required=True)
    _add_common(p)
    _add_grids(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="score query rows with a saved model")
    p.add_argument("--model-file", "--model", dest="model_file", type=Path, required=True)
    p.add_argument("--data", type=Path, required=True)
    p.add_argument("--has-labels", action="store_true", help="query file carries a trailing label column")
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("benchmark", help="split / tune / test every dataset in a directory")
    p.add_argument("--data", type=Path, required=True, help="directory of CSV files (or one file)")
    p.add_argument("--model", choices=("ocrkm", "lsocsvm"), default="ocrkm")
    p.add_argument("--models", type=lambda s: [m for m in s.split(",") if m],
                   help="comma-separated list, overrides --model")
    p.add_argument("--reps", type=int, default=5)
    p.add_argument("--out", type=Path, required=True)
    _add_common(p)
    _add_grids(p)
    p.set_defaults(func=cmd_benchmark)

    p = sub.add_parser("stats", help="rank statistics over a results table")
    p.add_argument("--results", type=Path, required=True)
    p.add_argument("--f-critical", type=float, help="critical value of F_F to test against")
    p.add_argument("--out", type=Path, help="output prefix for <out>.md and <out>.csv")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("sensitivity", help="test accuracy over an (eta, gamma) grid")
    p.add_argument("--data", type=Path, required=True)
    p.add_argument("--sigma", type=float, required=True)
    p.add_argument("--out", type=Path, required=True)
    _add_common(p)
    _add_grids(p)
    p.set_defaults(func=cmd_sensitivity)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(message)s",
        stream=sys.stderr,
    )
    log.info("oneclass-rkm %s %s started %s", __version__, args.command,
             datetime.now(timezone.utc).isoformat(timespec="seconds"))
    if getattr(args, "models", None):
        bad = [m for m in args.models if m not in ("ocrkm", "lsocsvm")]
        if bad:
            parser.error(f"unknown model(s): {', '.join(bad)}")
    try:
        return args.func(args)
    except StageError as err:
        cause = err.cause
        print(f"error during {err.stage}: {type(cause).__name__}: {cause}", file=sys.stderr)
        if isinstance(cause, NumericalError):
            return EXIT_NUMERIC
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
