"""Command-line entry point: ingest -> correlate -> search -> report.

Each command is idempotent: given identical inputs and seed it rewrites
byte-identical artifacts (no timestamps in any output). Artifact metadata
records the package version, the seed, a hash of the effective
configuration, and the defaults in force. The worker pool for searches is
bounded by --workers or the HYPERTS_WORKERS environment variable.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import pathlib
import sys

import numpy as np

from . import __version__
from .analysis import all_pair_lag_curves, correlation_matrix, \
    write_lag_csv, write_matrix_csv
from .data import SeriesTable, Scaler, align, load_csv, load_manifest, \
    make_windows, split, standardize
from .report import build_report, write_report_csv, write_report_json
from .search import Grid, enumerate_specs, run_search
from .train import TrainConfig

DATASET_FILE = "dataset.json"
TABLE_FILE = "table.csv"

DEFAULT_WINDOWS = [10, 20, 40, 60]
DEFAULT_SPANS = [1, 5, 10, 20]


def _config_hash(payload) -> str:
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _meta(seed, payload, defaults) -> dict:
    return {"version": __version__, "seed": seed,
            "config_hash": _config_hash(payload), "defaults": defaults}


def _meta_lines(meta: dict) -> list[str]:
    return [f"{k}: {json.dumps(meta[k], sort_keys=True)}"
            for k in sorted(meta)]


# -- ingest ----------------------------------------------------------------

def save_dataset(out_dir, table: SeriesTable, scaler: Scaler, target: str,
                 meta: dict) -> None:
    out = pathlib.Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    doc = {
        "meta": meta,
        "order": table.order,
        "target": target,
        "dates": [d.isoformat() for d in table.dates],
        "values": table.values.tolist(),
        "scaler": scaler.to_json_dict(),
    }
    with open(out / DATASET_FILE, "w") as fh:
        json.dump(doc, fh, sort_keys=True)
        fh.write("\n")
    with open(out / TABLE_FILE, "w") as fh:
        for line in _meta_lines(meta):
            fh.write(f"# {line}\n")
        fh.write("Date," + ",".join(table.order) + "\n")
        for day, row in zip(table.dates, table.values):
            fh.write(day.isoformat() + ","
                     + ",".join(repr(float(v)) for v in row) + "\n")


def load_dataset(data_dir) -> tuple[SeriesTable, Scaler, str]:
    import datetime
    with open(pathlib.Path(data_dir) / DATASET_FILE) as fh:
        doc = json.load(fh)
    table = SeriesTable(
        dates=[datetime.date.fromisoformat(d) for d in doc["dates"]],
        order=list(doc["order"]),
        values=np.asarray(doc["values"], dtype=np.float64))
    return table, Scaler.from_json_dict(doc["scaler"]), doc["target"]


def cmd_ingest(args) -> int:
    tickers, order, target = load_manifest(args.manifest)
    series = {name: load_csv(tickers[name], name) for name in order}
    table = align(series, order)
    table_std, scaler = standardize(table)
    payload = {"manifest": {n: str(tickers[n]) for n in order},
               "order": order, "target": target}
    meta = _meta(None, payload, {"price_column": "Close"})
    save_dataset(args.out, table_std, scaler, target, meta)
    print(f"ingested {len(table_std)} rows x {len(order)} columns"
          f" -> {args.out}")
    return 0


# -- correlate ---------------------------------------------------------------

def cmd_correlate(args) -> int:
    table, _, _ = load_dataset(args.data)
    out = pathlib.Path(args.out) if args.out else \
        pathlib.Path(args.data) / "correlations"
    out.mkdir(parents=True, exist_ok=True)
    meta = _meta(None, {"data": str(args.data), "max_lag": args.max_lag},
                 {"lag_convention": "values[l] = pearson(a[0:n-l], b[l:n])"})
    lines = _meta_lines(meta)
    matrix = correlation_matrix(table)
    write_matrix_csv(matrix, out / "correlation_matrix.csv", lines)
    curves = all_pair_lag_curves(table, max_lag=args.max_lag)
    for curve in curves:
        a, b = curve.pair
        write_lag_csv(curve, out / f"lag_{a}_{b}.csv", lines)
    print(f"wrote correlation matrix and {len(curves)} lag curves -> {out}")
    return 0


# -- search ------------------------------------------------------------------

def _class_label(kind: str, order: list[str], default_order: list[str]) -> str:
    base = {"cnn": "CNN", "lstm": "LSTM", "hyper": "H"}[kind]
    return base if order == default_order else base + "R"


def _restrict(values, wanted):
    if not wanted:
        return values
    keep = [v for v in values if v in wanted]
    if not keep:
        raise ValueError(f"restriction {wanted} leaves no values from {values}")
    return type(values)(keep)


def run_cell(data_dir, out_dir, kind: str, window: int, span: int,
             order: list[str] | None = None, algebras: list[str] | None = None,
             sizes: list[int] | None = None,
             dense_units: list[int] | None = None,
             max_configs: int | None = None, seed: int = 0,
             epochs: int = 100, batch_size: int = 32, lr: float = 1e-3,
             workers: int | None = None, folds: int = 10):
    """Run the grid search for one (class, window, span, order) cell."""
    table, scaler, target = load_dataset(data_dir)
    default_order = list(table.order)
    order = list(order) if order else default_order
    dataset = make_windows(table, target, window, span, order=order,
                           scaler=scaler)
    plan = split(dataset, cv_fraction=0.8, folds=folds)

    grid = Grid.default(kind, algebras=algebras)
    grid = Grid(kind=grid.kind,
                sizes=_restrict(grid.sizes, tuple(sizes or ())),
                algebras=grid.algebras,
                dense_units=_restrict(grid.dense_units,
                                      tuple(dense_units or ())),
                n_dense1=grid.n_dense1, n_dense2=grid.n_dense2,
                activations=grid.activations)
    specs = enumerate_specs(grid, window, span, seed)
    if max_configs is not None:
        specs = specs[:max_configs]

    label = _class_label(kind, order, default_order)
    config = TrainConfig(epochs=epochs, batch_size=batch_size, seed=seed,
                         lr=lr)
    out = pathlib.Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    payload = {"class": kind, "window": window, "span": span, "order": order,
               "seed": seed, "epochs": epochs, "batch_size": batch_size,
               "lr": lr, "grid_raw_size": grid.raw_size(),
               "configs": len(specs)}
    cell = {"label": label, "class": kind, "window": window, "span": span,
            "order": order, "target": target, "seed": seed,
            "grid_raw_size": grid.raw_size(), "configs": len(specs),
            "meta": _meta(seed, payload,
                          {"epochs": epochs, "batch_size": batch_size,
                           "lr": lr, "cv_fraction": 0.8, "folds": folds})}
    with open(out / "cell.json", "w") as fh:
        json.dump(cell, fh, sort_keys=True, indent=2)
        fh.write("\n")
    result = run_search(specs, dataset, plan, out, config=config,
                        base_seed=seed, workers=workers)
    return result, label


def cmd_search(args) -> int:
    if not args.all and args.klass is None:
        raise ValueError("--class is required unless --all is given")
    order = args.order.split(",") if args.order else None
    algebras = None if args.algebra in (None, "all") else [args.algebra]
    kind = {"cnn": "cnn", "lstm": "lstm", "h": "hyper", None: None}[args.klass]
    sizes = [int(s) for s in args.sizes.split(",")] if args.sizes else None
    dense_units = [int(s) for s in args.dense_units.split(",")] \
        if args.dense_units else None

    if args.all:
        windows = [int(w) for w in args.windows.split(",")] if args.windows \
            else DEFAULT_WINDOWS
        spans = [int(s) for s in args.spans.split(",")] if args.spans \
            else DEFAULT_SPANS
        cells = [(k, w, s, o)
                 for w in windows for s in spans
                 for k, o in [("cnn", None), ("lstm", None), ("hyper", None),
                              ("hyper", "rotate")]]
    else:
        cells = [(kind, args.window, args.span, order)]

    table, _, _ = load_dataset(args.data)
    for k, w, s, o in cells:
        if o == "rotate":
            o = table.order[1:] + table.order[:1]
        if args.all:
            out_dir = pathlib.Path(args.out) / label_dir(k, o, table.order,
                                                         w, s)
        else:
            out_dir = args.out
        result, label = run_cell(
            args.data, out_dir, k, w, s, order=o, algebras=algebras,
            sizes=sizes, dense_units=dense_units,
            max_configs=args.max_configs, seed=args.seed, epochs=args.epochs,
            batch_size=args.batch_size, lr=args.lr, workers=args.workers)
        print(f"{label} window={w} span={s}: best mean MAE"
              f" {result.best['mean_mae']:.4f},"
              f" params {result.best['param_count']},"
              f" holdout MAE {result.holdout_mae:.4f}")
    return 0


def label_dir(kind: str, order, default_order, window: int, span: int) -> str:
    label = _class_label(kind, list(order) if order else list(default_order),
                         list(default_order))
    return f"{label}_w{window}_s{span}"


# -- report --------------------------------------------------------------------

def cmd_report(args) -> int:
    report = build_report(args.in_dir)
    meta = _meta(None, {"in": str(args.in_dir)}, {})
    out = pathlib.Path(args.out)
    base = out.with_suffix("") if out.suffix in (".csv", ".json") else out
    write_report_csv(report, base.with_suffix(".csv"), _meta_lines(meta))
    write_report_json(report, base.with_suffix(".json"), meta)
    print(f"wrote {base.with_suffix('.csv')} and {base.with_suffix('.json')}"
          f" ({len(report['cells'])} cells)")
    return 0


# -- parser ----------------------------------------------------------------------

def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hyperts",
        description="Hypercomplex vs classical time-series forecasting"
                    " experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="align ticker CSVs into a dataset")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("correlate", help="correlation matrix and lag curves")
    p.add_argument("--data", required=True)
    p.add_argument("--max-lag", type=int, default=60)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_correlate)

    p = sub.add_parser("search", help="grid search one experiment cell")
    p.add_argument("--class", dest="klass", choices=["cnn", "lstm", "h"],
                   default=None)
    p.add_argument("--data", required=True)
    p.add_argument("--window", type=int, default=10)
    p.add_argument("--span", type=int, default=1)
    p.add_argument("--order", default=None,
                   help="comma-separated ticker permutation")
    p.add_argument("--algebra", default="all",
                   choices=["quaternion", "coquaternion", "cl11", "all"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--epochs", type=int, default=100)
    p.add_argument("--batch-size", type=int, default=32)
    p.add_argument("--lr", type=float, default=1e-3)
    p.add_argument("--sizes", default=None,
                   help="restrict the test-layer size axis, e.g. 8,16")
    p.add_argument("--dense-units", default=None,
                   help="restrict the dense-units axis")
    p.add_argument("--max-configs", type=int, default=None)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--all", action="store_true",
                   help="loop every window/span/class cell sequentially")
    p.add_argument("--windows", default=None,
                   help="window list for --all, e.g. 10,20 (default"
                        " 10,20,40,60)")
    p.add_argument("--spans", default=None,
                   help="span list for --all, e.g. 1,5 (default 1,5,10,20)")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("report", help="assemble the comparison table")
    p.add_argument("--in", dest="in_dir", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
