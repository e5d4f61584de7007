"""Hyperparameter grid enumeration, 10-fold cross-validation scoring, and a
resumable (optionally parallel) exhaustive search.

Every evaluated configuration is appended to ``progress.ndjson`` as soon as
it completes, so an interrupted search resumes without recomputation; the
final ``results.ndjson`` is rewritten in canonical spec order and carries no
timing, so repeated runs with the same seed are byte-identical regardless
of worker count or completion order.
"""

from __future__ import annotations

import concurrent.futures
import dataclasses
import json
import os
import pathlib
import time

import numpy as np

from .algebra import AlgebraKind
from .data import SplitPlan, WindowedDataset
from .model import ModelSpec, build
from .train import TrainConfig, evaluate, fit, write_history_csv

PROGRESS_FILE = "progress.ndjson"
RESULTS_FILE = "results.ndjson"
BEST_FILE = "best.json"
BEST_MODEL_FILE = "best_model.json"
BEST_HISTORY_FILE = "history_best.csv"

CNN_SIZES = [8, 16, 32, 64, 128]
LSTM_SIZES = [8, 16, 32, 64, 128]
HYPER_SIZES = [1, 2, 4, 8, 16, 32]
DENSE_UNITS = [8, 16, 32, 64]
ACTIVATIONS = ["linear", "relu"]
ALL_ALGEBRAS = [k.value for k in AlgebraKind]


@dataclasses.dataclass(frozen=True)
class Grid:
    """Axis value lists for one architecture class."""

    kind: str  # "cnn" | "lstm" | "hyper"
    sizes: tuple[int, ...]
    algebras: tuple[str, ...] = ()  # hyper only
    n_dense1: tuple[int, ...] = (0, 1)
    n_dense2: tuple[int, ...] = (0, 1)
    dense_units: tuple[int, ...] = tuple(DENSE_UNITS)
    activations: tuple[str, ...] = tuple(ACTIVATIONS)

    @classmethod
    def default(cls, kind: str, algebras: list[str] | None = None) -> "Grid":
        if kind == "cnn":
            return cls(kind="cnn", sizes=tuple(CNN_SIZES))
        if kind == "lstm":
            return cls(kind="lstm", sizes=tuple(LSTM_SIZES))
        if kind == "hyper":
            return cls(kind="hyper", sizes=tuple(HYPER_SIZES),
                       algebras=tuple(algebras or ALL_ALGEBRAS))
        raise ValueError(f"unknown class {kind!r}")

    def raw_size(self) -> int:
        n = len(self.sizes) * len(self.n_dense1) * len(self.n_dense2) \
            * len(self.dense_units) * len(self.activations)
        if self.kind == "hyper":
            n *= len(self.algebras)
        return n


def enumerate_specs(grid: Grid, window: int, span: int,
                    seed: int) -> list[ModelSpec]:
    """Lexicographic Cartesian product, deduplicated.

    When both optional dense layers are absent the (dense_units, activation)
    axes are inert: those combinations collapse to one canonical spec with
    the grid's first dense_units and activation values.
    """
    algebras = grid.algebras if grid.kind == "hyper" else (None,)
    specs: list[ModelSpec] = []
    seen: set[str] = set()
    for size in grid.sizes:
        for algebra in algebras:
            for nd1 in grid.n_dense1:
                for nd2 in grid.n_dense2:
                    for units in grid.dense_units:
                        for act in grid.activations:
                            if nd1 == 0 and nd2 == 0:
                                units_c = grid.dense_units[0]
                                act_c = grid.activations[0]
                            else:
                                units_c, act_c = units, act
                            spec = ModelSpec(
                                kind=grid.kind, size=size, algebra=algebra,
                                n_dense1=nd1, n_dense2=nd2,
                                dense_units=units_c, dense_activation=act_c,
                                window=window, span=span, seed=seed)
                            key = spec.canonical()
                            if key not in seen:
                                seen.add(key)
                                specs.append(spec)
    return specs


def fold_seeds(base_seed: int, spec: ModelSpec, fold: int) -> tuple[int, int]:
    """(model seed, shuffle seed) for one fold, stable across processes and
    scheduling order."""
    ss = np.random.SeedSequence([base_seed, spec.stable_id(), fold])
    state = ss.generate_state(2)
    return int(state[0]), int(state[1])


def cross_validate(spec: ModelSpec, dataset: WindowedDataset, plan: SplitPlan,
                   config: TrainConfig = TrainConfig(),
                   base_seed: int = 0) -> tuple[float, list[float]]:
    """Mean MAE over k folds: train on cv minus fold, score MAE on the fold.

    A fresh model is built per fold from a seed derived from
    (base_seed, spec id, fold index).
    """
    if any(len(f) < 1 for f in plan.folds):
        raise ValueError("cross_validate: every fold needs at least 1 sample")
    cv_set = set(plan.cv_indices.tolist())
    maes = []
    for k, fold in enumerate(plan.folds):
        train_idx = np.array(sorted(cv_set - set(fold.tolist())))
        model_seed, shuffle_seed = fold_seeds(base_seed, spec, k)
        model = build(dataclasses.replace(spec, seed=model_seed))
        cfg = dataclasses.replace(config, seed=shuffle_seed)
        fit(model, dataset.x[train_idx], dataset.y[train_idx], cfg)
        maes.append(evaluate(model, dataset.x[fold], dataset.y[fold]))
    return float(np.mean(maes)), maes


def _record_sort_key(record: dict) -> str:
    return json.dumps(record["spec"], sort_keys=True, separators=(",", ":"))


def _best_of(records: list[dict]) -> dict:
    """argmin mean MAE, ties broken by smaller param_count then by the
    lexicographic canonical spec."""
    return min(records, key=lambda r: (r["mean_mae"], r["param_count"],
                                       _record_sort_key(r)))


# Worker-side dataset/plan, installed once per process by the pool
# initializer so tasks only carry the spec.
_WORK = {}


def _init_worker(dataset, plan, config, base_seed):
    _WORK["args"] = (dataset, plan, config, base_seed)


def _eval_spec(spec_doc: dict) -> dict:
    dataset, plan, config, base_seed = _WORK["args"]
    spec = ModelSpec.from_json_dict(spec_doc)
    start = time.perf_counter()
    mean_mae, maes = cross_validate(spec, dataset, plan, config, base_seed)
    seconds = time.perf_counter() - start
    return {
        "spec": spec.to_json_dict(),
        "fold_maes": maes,
        "mean_mae": mean_mae,
        "param_count": build(spec).param_count(),
        "seconds": seconds,
    }


@dataclasses.dataclass
class SearchResult:
    records: list[dict]
    best: dict
    holdout_mae: float | None = None

    @property
    def best_spec(self) -> ModelSpec:
        return ModelSpec.from_json_dict(self.best["spec"])


def resolve_workers(workers: int | None = None) -> int:
    if workers is not None:
        return max(1, workers)
    env = os.environ.get("HYPERTS_WORKERS")
    return max(1, int(env)) if env else 1


def run_search(specs: list[ModelSpec], dataset: WindowedDataset,
               plan: SplitPlan, out_dir,
               config: TrainConfig = TrainConfig(), base_seed: int = 0,
               workers: int | None = None,
               train_best_on_cv: bool = True) -> SearchResult:
    """Evaluate every spec, checkpointing each result as it completes.

    Already-recorded specs (keyed by canonical serialization) are skipped on
    resume. After scoring, the best spec is retrained on the full CV block
    and scored on the holdout block; its weights are saved alongside the
    ledgers.
    """
    out = pathlib.Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    progress_path = out / PROGRESS_FILE

    done: dict[str, dict] = {}
    if progress_path.exists():
        with open(progress_path) as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                record = json.loads(line)
                done.setdefault(_record_sort_key(record), record)

    wanted = {spec.canonical(): spec for spec in specs}
    todo = [spec for key, spec in wanted.items() if key not in done]

    nworkers = resolve_workers(workers)
    with open(progress_path, "a") as ledger:
        def note(record):
            ledger.write(json.dumps(record, sort_keys=True) + "\n")
            ledger.flush()
            done[_record_sort_key(record)] = record

        if nworkers == 1 or len(todo) <= 1:
            _init_worker(dataset, plan, config, base_seed)
            for spec in todo:
                note(_eval_spec(spec.to_json_dict()))
        else:
            with concurrent.futures.ProcessPoolExecutor(
                    max_workers=nworkers, initializer=_init_worker,
                    initargs=(dataset, plan, config, base_seed)) as pool:
                futures = [pool.submit(_eval_spec, s.to_json_dict())
                           for s in todo]
                for fut in concurrent.futures.as_completed(futures):
                    note(fut.result())

    records = sorted((done[key] for key in wanted), key=_record_sort_key)
    canonical = [{k: r[k] for k in
                  ("spec", "fold_maes", "mean_mae", "param_count")}
                 for r in records]
    with open(out / RESULTS_FILE, "w") as fh:
        for record in canonical:
            fh.write(json.dumps(record, sort_keys=True) + "\n")

    best = _best_of(canonical)
    result = SearchResult(records=canonical, best=best)

    if train_best_on_cv:
        spec = result.best_spec
        model_seed, shuffle_seed = fold_seeds(base_seed, spec, len(plan.folds))
        model = build(dataclasses.replace(spec, seed=model_seed))
        history = fit(model, dataset.x[plan.cv_indices],
                      dataset.y[plan.cv_indices],
                      dataclasses.replace(config, seed=shuffle_seed))
        result.holdout_mae = evaluate(model, dataset.x[plan.holdout_indices],
                                      dataset.y[plan.holdout_indices])
        model.save(out / BEST_MODEL_FILE)
        write_history_csv(history, out / BEST_HISTORY_FILE,
                          header_lines=[f"spec: {spec.canonical()}"])

    best_doc = dict(best)
    if result.holdout_mae is not None:
        best_doc["holdout_mae"] = result.holdout_mae
    with open(out / BEST_FILE, "w") as fh:
        json.dump(best_doc, fh, sort_keys=True, indent=2)
        fh.write("\n")
    return result
