"""Experiment orchestration: calibration scenarios, CV loops, statistics, tables."""
from __future__ import annotations

import json
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from .calibration import apply_calibration, dgg_generate, dgg_group, fit_enir
from .classifiers import (
    RFParams,
    fit_gaussian_nb,
    fit_random_forest,
    predict_proba_nb,
    predict_proba_rf,
)
from .dataset import (
    LabeledDataset,
    generate_waveform,
    load_csv,
    merge_classes,
    stratified_kfold,
)
from .decomposition import build_allpairs_tasks, build_ovr_tasks
from .errors import HarnessError, MccalibError, UnsupportedFormatError
from .metrics import check_probability_matrix, log_loss, mse, one_hot
from .coupling import normalize_combine, pairwise_couple
from .seeding import derive_seed
from .stats import paired_t_test, welch_t_test

log = logging.getLogger(__name__)


class Scenario(str, Enum):
    MULTICLASS_RAW = "multiclass-raw"
    OVR_RAW = "ovr-raw"
    OVR_CALIBRATED = "ovr-calibrated"
    ALLPAIRS_RAW = "allpairs-raw"
    ALLPAIRS_CALIBRATED = "allpairs-calibrated"


ALL_SCENARIOS = tuple(Scenario)

SCENARIO_LABELS = {
    Scenario.MULTICLASS_RAW: "Multi-class Raw",
    Scenario.OVR_RAW: "One-vs-rest Raw",
    Scenario.OVR_CALIBRATED: "One-vs-rest DGG+ENIR",
    Scenario.ALLPAIRS_RAW: "All pairs Raw",
    Scenario.ALLPAIRS_CALIBRATED: "All pairs DGG+ENIR",
}

METRICS = ("mse", "ll")


@dataclass(frozen=True)
class DggParams:
    """Calibration-data generation knobs.

    The number of Monte-Carlo rounds is chosen per task so the pooled size
    reaches ``pool_target`` points (the pool is truncated to exactly that
    size), keeping the generated amount identical across decomposition
    schemes.
    """

    pool_target: int = 2000
    holdout_fraction: float = 0.2
    group_size: int = 20

    def to_dict(self) -> dict:
        return {
            "pool_target": self.pool_target,
            "holdout_fraction": self.holdout_fraction,
            "group_size": self.group_size,
        }


@dataclass(frozen=True)
class CouplingParams:
    tol: float = 1e-10
    max_iter: int = 1000

    def to_dict(self) -> dict:
        return {"tol": self.tol, "max_iter": self.max_iter}


@dataclass(frozen=True)
class ClassifierSpec:
    """Base classifier choice: 'nb' or 'rf' (with forest hyperparameters)."""

    name: str
    rf: RFParams = RFParams()

    def __post_init__(self):
        if self.name not in ("nb", "rf"):
            raise ValueError(f"unknown classifier {self.name!r} (expected 'nb' or 'rf')")

    def to_dict(self) -> dict:
        doc: dict = {"name": self.name}
        if self.name == "rf":
            doc["rf"] = self.rf.to_dict()
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "ClassifierSpec":
        rf = RFParams.from_dict(doc["rf"]) if "rf" in doc else RFParams()
        return cls(name=doc["name"], rf=rf)


@dataclass(frozen=True)
class DatasetRecipe:
    """Where a dataset comes from and how it is preprocessed.

    Either ``path``+``label_column`` (CSV) or ``synthetic='waveform'`` with
    ``n``/``seed``. ``merge_groups`` lists groups of class names collapsed
    into one class each; with ``allow_missing_classes`` group members absent
    from the file are silently skipped (useful for recipes that enumerate
    label values which may not all occur).
    """

    id: str
    path: str | None = None
    label_column: str | int | None = None
    delimiter: str = ","
    header: bool = True
    merge_groups: tuple = ()
    allow_missing_classes: bool = False
    synthetic: str | None = None
    n: int = 5000
    seed: int = 0

    def to_dict(self) -> dict:
        doc: dict = {"id": self.id}
        if self.synthetic:
            doc.update({"synthetic": self.synthetic, "n": self.n, "seed": self.seed})
        else:
            doc.update(
                {
                    "path": self.path,
                    "label_column": self.label_column,
                    "delimiter": self.delimiter,
                    "header": self.header,
                }
            )
        if self.merge_groups:
            doc["merge_groups"] = [list(g) for g in self.merge_groups]
            doc["allow_missing_classes"] = self.allow_missing_classes
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "DatasetRecipe":
        return cls(
            id=doc["id"],
            path=doc.get("path"),
            label_column=doc.get("label_column"),
            delimiter=doc.get("delimiter", ","),
            header=doc.get("header", True),
            merge_groups=tuple(tuple(g) for g in doc.get("merge_groups", ())),
            allow_missing_classes=doc.get("allow_missing_classes", False),
            synthetic=doc.get("synthetic"),
            n=doc.get("n", 5000),
            seed=doc.get("seed", 0),
        )


@dataclass(frozen=True)
class ExperimentConfig:
    datasets: tuple[DatasetRecipe, ...]
    classifiers: tuple[ClassifierSpec, ...]
    scenarios: tuple[Scenario, ...] = ALL_SCENARIOS
    n_folds: int = 10
    seed: int = 0
    dgg: DggParams = DggParams()
    coupling: CouplingParams = CouplingParams()
    test: str = "welch"
    alpha: float = 0.05
    jobs: int = 1

    def __post_init__(self):
        if not self.datasets or not self.classifiers or not self.scenarios:
            raise ValueError("config needs at least one dataset, classifier, and scenario")
        if self.n_folds < 2:
            raise ValueError("n_folds must be >= 2")
        if self.test not in ("welch", "paired"):
            raise ValueError(f"unknown test {self.test!r}")

    def to_dict(self) -> dict:
        return {
            "datasets": [d.to_dict() for d in self.datasets],
            "classifiers": [c.to_dict() for c in self.classifiers],
            "scenarios": [s.value for s in self.scenarios],
            "n_folds": self.n_folds,
            "seed": self.seed,
            "dgg": self.dgg.to_dict(),
            "coupling": self.coupling.to_dict(),
            "test": self.test,
            "alpha": self.alpha,
            "jobs": self.jobs,
        }

    @classmethod
    def from_dict(cls, doc: dict, base_dir: Path | None = None) -> "ExperimentConfig":
        recipes = []
        for entry in doc["datasets"]:
            if "recipe_file" in entry:
                ref = Path(entry["recipe_file"])
                if base_dir is not None and not ref.is_absolute():
                    ref = base_dir / ref
                entry = json.loads(ref.read_text())
            if base_dir is not None and entry.get("path") and not Path(entry["path"]).is_absolute():
                entry = dict(entry, path=str(base_dir / entry["path"]))
            recipes.append(DatasetRecipe.from_dict(entry))
        return cls(
            datasets=tuple(recipes),
            classifiers=tuple(ClassifierSpec.from_dict(c) for c in doc["classifiers"]),
            scenarios=tuple(Scenario(s) for s in doc.get("scenarios", [s.value for s in ALL_SCENARIOS])),
            n_folds=doc.get("n_folds", 10),
            seed=doc.get("seed", 0),
            dgg=DggParams(**doc.get("dgg", {})),
            coupling=CouplingParams(**doc.get("coupling", {})),
            test=doc.get("test", "welch"),
            alpha=doc.get("alpha", 0.05),
            jobs=doc.get("jobs", 1),
        )

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        path = Path(path)
        return cls.from_dict(json.loads(path.read_text()), base_dir=path.parent)


@dataclass
class FoldOutput:
    """What one scenario produced on one test fold."""

    probabilities: np.ndarray
    test_labels: np.ndarray
    model_seconds: float
    calibration_seconds: float
    n_tasks: int
    degenerate_tasks: int


@dataclass(frozen=True)
class ScenarioResult:
    dataset_id: str
    classifier_id: str
    scenario: Scenario
    mse_per_fold: tuple[float, ...]
    ll_per_fold: tuple[float, ...]
    model_seconds: tuple[float, ...]
    calibration_seconds: tuple[float, ...]
    n_tasks: int
    degenerate_tasks: int

    @property
    def mean_mse(self) -> float:
        return float(np.mean(self.mse_per_fold))

    @property
    def mean_ll(self) -> float:
        return float(np.mean(self.ll_per_fold))

    def mean_metric(self, metric: str) -> float:
        return self.mean_mse if metric == "mse" else self.mean_ll

    @property
    def calibration_seconds_per_task(self) -> tuple[float, ...] | None:
        """Per-fold calibration time divided by the binary task count."""
        if self.n_tasks == 0:
            return None
        return tuple(s / self.n_tasks for s in self.calibration_seconds)

    def to_dict(self) -> dict:
        per_task = self.calibration_seconds_per_task
        return {
            "dataset": self.dataset_id,
            "classifier": self.classifier_id,
            "scenario": self.scenario.value,
            "mse_per_fold": list(self.mse_per_fold),
            "ll_per_fold": list(self.ll_per_fold),
            "mean_mse": self.mean_mse,
            "mean_ll": self.mean_ll,
            "model_seconds": list(self.model_seconds),
            "calibration_seconds": list(self.calibration_seconds),
            "calibration_seconds_per_task": list(per_task) if per_task else None,
            "n_tasks": self.n_tasks,
            "degenerate_tasks": self.degenerate_tasks,
        }


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    results: list[ScenarioResult] = field(default_factory=list)
    comparisons: dict = field(default_factory=dict)  # (did, clf, scenario, metric) -> TestResult
    failures: list[tuple[str, str, str]] = field(default_factory=list)

    def result_for(self, dataset_id, classifier_id, scenario) -> ScenarioResult | None:
        for r in self.results:
            if (
                r.dataset_id == dataset_id
                and r.classifier_id == classifier_id
                and r.scenario == scenario
            ):
                return r
        return None

    def best_scenario(self, dataset_id, classifier_id, metric: str) -> Scenario | None:
        """Scenario with the smallest mean metric; config order breaks ties."""
        best = None
        best_value = math.inf
        for scenario in self.config.scenarios:
            r = self.result_for(dataset_id, classifier_id, scenario)
            if r is not None and r.mean_metric(metric) < best_value:
                best_value = r.mean_metric(metric)
                best = scenario
        return best

    def to_dict(self) -> dict:
        comparisons = []
        for (did, clf, scenario, metric), tr in sorted(
            self.comparisons.items(), key=lambda kv: (kv[0][0], kv[0][1], kv[0][2].value, kv[0][3])
        ):
            comparisons.append(
                {
                    "dataset": did,
                    "classifier": clf,
                    "scenario": scenario.value,
                    "metric": metric,
                    "t": tr.t,
                    "df": tr.df,
                    "p_value": tr.p_value,
                    "significant": tr.significant,
                    "zero_variance": tr.zero_variance,
                }
            )
        best = []
        for did in [d.id for d in self.config.datasets]:
            for clf in [c.name for c in self.config.classifiers]:
                row = {"dataset": did, "classifier": clf}
                for metric in METRICS:
                    scen = self.best_scenario(did, clf, metric)
                    row[f"best_{metric}"] = scen.value if scen else None
                best.append(row)
        return {
            "config": self.config.to_dict(),
            "results": [r.to_dict() for r in self.results],
            "comparisons": comparisons,
            "best": best,
            "failures": [list(f) for f in self.failures],
        }


def load_recipe(recipe: DatasetRecipe) -> LabeledDataset:
    """Materialize a dataset recipe: load or generate, then apply merges."""
    if recipe.synthetic:
        if recipe.synthetic != "waveform":
            raise ValueError(f"unknown synthetic dataset {recipe.synthetic!r}")
        ds = generate_waveform(recipe.n, recipe.seed)
    else:
        if recipe.path is None or recipe.label_column is None:
            raise ValueError(f"recipe {recipe.id!r} needs path and label_column")
        ds = load_csv(
            recipe.path, recipe.label_column, delimiter=recipe.delimiter, header=recipe.header
        )
    groups = [list(g) for g in recipe.merge_groups]
    if recipe.allow_missing_classes:
        present = set(ds.class_names)
        groups = [[c for c in g if c in present] for g in groups]
        groups = [g for g in groups if len(g) >= 2]
    if groups:
        ds = merge_classes(ds, groups)
    return ds


def _fit_multiclass(spec: ClassifierSpec, ds: LabeledDataset, seed: int):
    if spec.name == "nb":
        return fit_gaussian_nb(ds)
    return fit_random_forest(ds, spec.rf, seed)


def _predict_multiclass(spec: ClassifierSpec, model, X) -> np.ndarray:
    if spec.name == "nb":
        return predict_proba_nb(model, X)
    return predict_proba_rf(model, X)


def binary_trainer(spec: ClassifierSpec):
    """A ``trainer(X, y01, seed) -> scorer`` closure for binary subproblems."""

    def train(X, y01, seed):
        ds = LabeledDataset(X, y01, ("neg", "pos"))
        model = _fit_multiclass(spec, ds, seed)
        return lambda Xq: _predict_multiclass(spec, model, Xq)[:, 1]

    return train


def _dgg_rounds(task, fraction: float, target: int) -> int:
    counts = np.bincount(task.binary_labels, minlength=2)
    holdout = 0
    for n_side in counts:
        holdout += min(max(int(round(fraction * n_side)), 1), max(int(n_side) - 1, 1))
    return max(1, math.ceil(target / holdout))


def _task_scores(task, ds_train, X_test, spec, cfg, seed_path, calibrated):
    """Scores of one binary task on the test features, optionally calibrated.

    Degenerate tasks (one class only in the training slice) fall back to a
    constant predictor at the positive-class training prior.
    """
    if task.is_degenerate:
        return np.full(len(X_test), task.positive_fraction), 0.0, 0.0, 1
    trainer = binary_trainer(spec)
    features = ds_train.features
    t0 = time.perf_counter()
    predictor = trainer(
        features[task.sample_indices],
        task.binary_labels,
        derive_seed(*seed_path, "task-model"),
    )
    model_seconds = time.perf_counter() - t0
    scores = np.clip(np.asarray(predictor(X_test), dtype=np.float64), 0.0, 1.0)
    calibration_seconds = 0.0
    if calibrated:
        t0 = time.perf_counter()
        rounds = _dgg_rounds(task, cfg.dgg.holdout_fraction, cfg.dgg.pool_target)
        pool = dgg_generate(
            task,
            features,
            trainer,
            rounds=rounds,
            holdout_fraction=cfg.dgg.holdout_fraction,
            seed=derive_seed(*seed_path, "dgg"),
        )
        del pool[cfg.dgg.pool_target :]  # keep the generated amount identical across tasks
        calibrator = fit_enir(dgg_group(pool, cfg.dgg.group_size))
        calibration_seconds = time.perf_counter() - t0
        scores = apply_calibration(calibrator, scores)
    return scores, model_seconds, calibration_seconds, 0


def run_fold(
    ds: LabeledDataset,
    plan,
    fold: int,
    spec: ClassifierSpec,
    scenario: Scenario,
    cfg: ExperimentConfig,
    dataset_id: str,
) -> FoldOutput:
    """Train on everything outside ``fold``, score the fold's test samples."""
    train_idx = plan.train_indices(fold)
    test_idx = plan.test_indices(fold)
    assert len(np.intersect1d(train_idx, test_idx)) == 0
    assert len(train_idx) + len(test_idx) == ds.n_samples
    ds_train = ds.subset(train_idx)
    X_test = ds.features[test_idx]
    y_test = ds.labels[test_idx]
    k = ds.n_classes

    model_seconds = 0.0
    calibration_seconds = 0.0
    n_tasks = 0
    degenerate = 0

    if scenario == Scenario.MULTICLASS_RAW:
        t0 = time.perf_counter()
        model = _fit_multiclass(
            spec, ds_train, derive_seed(cfg.seed, dataset_id, spec.name, fold, "model")
        )
        model_seconds = time.perf_counter() - t0
        P = _predict_multiclass(spec, model, X_test)
    elif scenario in (Scenario.OVR_RAW, Scenario.OVR_CALIBRATED):
        tasks = build_ovr_tasks(ds_train)
        n_tasks = len(tasks)
        S = np.empty((len(test_idx), k))
        for ti, task in enumerate(tasks):
            seed_path = (cfg.seed, dataset_id, spec.name, fold, ti)
            try:
                scores, dm, dc, dd = _task_scores(
                    task, ds_train, X_test, spec, cfg, seed_path,
                    calibrated=scenario == Scenario.OVR_CALIBRATED,
                )
            except MccalibError as exc:
                raise HarnessError(f"{dataset_id}: fold {fold}, ovr task {ti}: {exc}") from exc
            model_seconds += dm
            calibration_seconds += dc
            degenerate += dd
            S[:, task.positive_class] = scores
        P = np.stack([normalize_combine(row) for row in S])
    elif scenario in (Scenario.ALLPAIRS_RAW, Scenario.ALLPAIRS_CALIBRATED):
        tasks = build_allpairs_tasks(ds_train)
        n_tasks = len(tasks)
        R = np.zeros((len(test_idx), k, k))
        for ti, task in enumerate(tasks):
            seed_path = (cfg.seed, dataset_id, spec.name, fold, ti)
            try:
                scores, dm, dc, dd = _task_scores(
                    task, ds_train, X_test, spec, cfg, seed_path,
                    calibrated=scenario == Scenario.ALLPAIRS_CALIBRATED,
                )
            except MccalibError as exc:
                raise HarnessError(f"{dataset_id}: fold {fold}, pair task {ti}: {exc}") from exc
            model_seconds += dm
            calibration_seconds += dc
            degenerate += dd
            i, j = task.positive_class, next(iter(task.negative_classes))
            R[:, i, j] = scores
            R[:, j, i] = 1.0 - scores
        P = np.empty((len(test_idx), k))
        for row in range(len(test_idx)):
            out = pairwise_couple(R[row], cfg.coupling.tol, cfg.coupling.max_iter)
            if not out.converged:
                log.warning(
                    "%s fold %d row %d: coupling stopped after %d iterations",
                    dataset_id, fold, row, out.iterations,
                )
            P[row] = out.probabilities
    else:  # pragma: no cover - enum is closed
        raise ValueError(f"unknown scenario {scenario!r}")

    check_probability_matrix(P)
    return FoldOutput(P, y_test, model_seconds, calibration_seconds, n_tasks, degenerate)


def run_scenario(
    ds: LabeledDataset,
    spec: ClassifierSpec,
    scenario: Scenario,
    cfg: ExperimentConfig,
    dataset_id: str,
    plan=None,
) -> ScenarioResult:
    """All CV folds of one (dataset, classifier, scenario) triple."""
    if plan is None:
        plan = stratified_kfold(ds, cfg.n_folds, derive_seed(cfg.seed, dataset_id, "folds"))
    mses, lls, model_s, cal_s = [], [], [], []
    n_tasks = 0
    degenerate = 0
    for fold in range(plan.n_folds):
        out = run_fold(ds, plan, fold, spec, scenario, cfg, dataset_id)
        Y = one_hot(out.test_labels, ds.n_classes)
        mses.append(mse(out.probabilities, Y))
        lls.append(log_loss(out.probabilities, Y))
        model_s.append(out.model_seconds)
        cal_s.append(out.calibration_seconds)
        n_tasks = out.n_tasks
        degenerate += out.degenerate_tasks
    return ScenarioResult(
        dataset_id=dataset_id,
        classifier_id=spec.name,
        scenario=scenario,
        mse_per_fold=tuple(mses),
        ll_per_fold=tuple(lls),
        model_seconds=tuple(model_s),
        calibration_seconds=tuple(cal_s),
        n_tasks=n_tasks,
        degenerate_tasks=degenerate,
    )


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    """The full grid: datasets x classifiers x scenarios, plus statistics.

    Fold plans are computed once per dataset so every scenario (and both
    classifiers) sees identical splits. Dataset failures are collected, not
    fatal. With ``cfg.jobs > 1`` the grid cells run in a thread pool; all
    randomness is derived per (seed, dataset, classifier, fold, task), so
    results do not depend on scheduling.
    """
    result = ExperimentResult(config=cfg)
    loaded: list[tuple[DatasetRecipe, LabeledDataset, object]] = []
    for recipe in cfg.datasets:
        try:
            ds = load_recipe(recipe)
            plan = stratified_kfold(ds, cfg.n_folds, derive_seed(cfg.seed, recipe.id, "folds"))
            loaded.append((recipe, ds, plan))
        except Exception as exc:  # noqa: BLE001 - per-dataset isolation is the contract
            log.error("dataset %s failed to load: %s", recipe.id, exc)
            result.failures.append((recipe.id, "*", str(exc)))

    cells = [
        (recipe, ds, plan, spec, scenario)
        for recipe, ds, plan in loaded
        for spec in cfg.classifiers
        for scenario in cfg.scenarios
    ]

    def run_cell(cell):
        recipe, ds, plan, spec, scenario = cell
        return run_scenario(ds, spec, scenario, cfg, recipe.id, plan)

    outcomes: dict[tuple[str, str, Scenario], ScenarioResult] = {}
    if cfg.jobs > 1:
        with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            futures = {pool.submit(run_cell, cell): cell for cell in cells}
            for future, cell in futures.items():
                recipe, _, _, spec, scenario = cell
                try:
                    r = future.result()
                    outcomes[(recipe.id, spec.name, scenario)] = r
                except Exception as exc:  # noqa: BLE001
                    log.error("%s/%s/%s failed: %s", recipe.id, spec.name, scenario.value, exc)
                    result.failures.append((recipe.id, spec.name, f"{scenario.value}: {exc}"))
    else:
        for cell in cells:
            recipe, _, _, spec, scenario = cell
            try:
                outcomes[(recipe.id, spec.name, scenario)] = run_cell(cell)
            except Exception as exc:  # noqa: BLE001
                log.error("%s/%s/%s failed: %s", recipe.id, spec.name, scenario.value, exc)
                result.failures.append((recipe.id, spec.name, f"{scenario.value}: {exc}"))

    # order-normalized aggregation: config order, independent of scheduling
    for recipe in cfg.datasets:
        for spec in cfg.classifiers:
            for scenario in cfg.scenarios:
                r = outcomes.get((recipe.id, spec.name, scenario))
                if r is not None:
                    result.results.append(r)

    test_fn = welch_t_test if cfg.test == "welch" else paired_t_test
    for recipe in cfg.datasets:
        for spec in cfg.classifiers:
            baseline = outcomes.get((recipe.id, spec.name, Scenario.MULTICLASS_RAW))
            if baseline is None:
                continue
            for scenario in cfg.scenarios:
                r = outcomes.get((recipe.id, spec.name, scenario))
                if r is None:
                    continue
                for metric in METRICS:
                    a = getattr(r, f"{metric}_per_fold")
                    b = getattr(baseline, f"{metric}_per_fold")
                    result.comparisons[(recipe.id, spec.name, scenario, metric)] = test_fn(
                        a, b, cfg.alpha
                    )
    return result


# ---------------------------------------------------------------------------
# table emission


def _fmt_float(x: float) -> str:
    return f"{x:.10g}"


def emit_table(result: ExperimentResult, fmt: str) -> str:
    """Render the metric results as 'csv', 'markdown', or 'json'.

    Markdown marks the best scenario per row/metric in bold (exactly once)
    and statistically significant differences from the multi-class raw
    baseline with a dagger. CSV keeps numeric cells plain and carries the
    markers in 0/1 companion columns.
    """
    if not result.results:
        raise ValueError("empty result bundle")
    if fmt == "json":
        return json.dumps(result.to_dict(), indent=2, sort_keys=True)
    if fmt == "csv":
        return _emit_metrics_csv(result)
    if fmt == "markdown":
        return _emit_metrics_markdown(result)
    raise UnsupportedFormatError(f"unknown format {fmt!r} (csv, markdown, json)")


def _pairs(result: ExperimentResult):
    for spec in result.config.classifiers:
        for recipe in result.config.datasets:
            rows = {
                scenario: result.result_for(recipe.id, spec.name, scenario)
                for scenario in result.config.scenarios
            }
            if any(r is not None for r in rows.values()):
                yield spec, recipe, rows


def _emit_metrics_csv(result: ExperimentResult) -> str:
    scenarios = result.config.scenarios
    header = ["classifier", "dataset"]
    for scenario in scenarios:
        for metric in METRICS:
            header.append(f"{scenario.value}:{metric}")
    for scenario in scenarios:
        for metric in METRICS:
            header.append(f"{scenario.value}:{metric}:significant")
    header += ["best_mse", "best_ll"]
    lines = [",".join(header)]
    for spec, recipe, rows in _pairs(result):
        cells = [spec.name, recipe.id]
        for scenario in scenarios:
            r = rows.get(scenario)
            for metric in METRICS:
                cells.append(_fmt_float(r.mean_metric(metric)) if r else "")
        for scenario in scenarios:
            for metric in METRICS:
                tr = result.comparisons.get((recipe.id, spec.name, scenario, metric))
                cells.append("" if tr is None else str(int(tr.significant)))
        for metric in METRICS:
            best = result.best_scenario(recipe.id, spec.name, metric)
            cells.append(best.value if best else "")
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def _emit_metrics_markdown(result: ExperimentResult) -> str:
    scenarios = result.config.scenarios
    out = []
    for spec in result.config.classifiers:
        out.append(f"### {spec.name}")
        out.append("")
        header = ["Data set"]
        for scenario in scenarios:
            label = SCENARIO_LABELS[scenario]
            header += [f"{label} MSE", f"{label} LL"]
        out.append("| " + " | ".join(header) + " |")
        out.append("|" + "---|" * len(header))
        for spec2, recipe, rows in _pairs(result):
            if spec2 is not spec:
                continue
            cells = [recipe.id]
            best = {m: result.best_scenario(recipe.id, spec.name, m) for m in METRICS}
            for scenario in scenarios:
                r = rows.get(scenario)
                for metric in METRICS:
                    if r is None:
                        cells.append("-")
                        continue
                    text = f"{r.mean_metric(metric):.3f}"
                    if scenario == best[metric]:
                        text = f"**{text}**"
                    tr = result.comparisons.get((recipe.id, spec.name, scenario, metric))
                    if tr is not None and tr.significant and scenario != Scenario.MULTICLASS_RAW:
                        text += "†"
                    cells.append(text)
            out.append("| " + " | ".join(cells) + " |")
        out.append("")
    out.append(
        "Bold marks the best scenario per metric; † marks a significant difference "
        f"from {SCENARIO_LABELS[Scenario.MULTICLASS_RAW]} ({result.config.test}, "
        f"alpha={result.config.alpha})."
    )
    return "\n".join(out) + "\n"


def emit_timing_table(result: ExperimentResult, fmt: str) -> str:
    """Model-fit and per-binary-task calibration seconds per (classifier, scenario).

    Times are averaged over datasets and folds; calibration time is divided
    by the binary task count so schemes with different task counts stay
    comparable.
    """
    if not result.results:
        raise ValueError("empty result bundle")
    rows = []
    for spec in result.config.classifiers:
        for scenario in result.config.scenarios:
            model_times, cal_per_task = [], []
            for r in result.results:
                if r.classifier_id != spec.name or r.scenario != scenario:
                    continue
                model_times.extend(r.model_seconds)
                per_task = r.calibration_seconds_per_task
                if per_task is not None and scenario in (
                    Scenario.OVR_CALIBRATED,
                    Scenario.ALLPAIRS_CALIBRATED,
                ):
                    cal_per_task.extend(per_task)
            if not model_times:
                continue
            rows.append(
                (
                    spec.name,
                    scenario,
                    float(np.mean(model_times)),
                    float(np.mean(cal_per_task)) if cal_per_task else None,
                )
            )
    if fmt == "json":
        return json.dumps(
            [
                {
                    "classifier": name,
                    "scenario": scenario.value,
                    "model_seconds": m,
                    "calibration_seconds_per_task": c,
                }
                for name, scenario, m, c in rows
            ],
            indent=2,
            sort_keys=True,
        )
    if fmt == "csv":
        lines = ["classifier,scenario,model_seconds,calibration_seconds_per_task"]
        for name, scenario, m, c in rows:
            lines.append(
                f"{name},{scenario.value},{_fmt_float(m)},{'' if c is None else _fmt_float(c)}"
            )
        return "\n".join(lines) + "\n"
    if fmt == "markdown":
        lines = [
            "| Scenario | Model | Calibration (per binary task) |",
            "|---|---|---|",
        ]
        for name, scenario, m, c in rows:
            cal = "-" if c is None else f"{c:.3f}s"
            lines.append(f"| {name} {SCENARIO_LABELS[scenario]} | {m:.3f}s | {cal} |")
        return "\n".join(lines) + "\n"
    raise UnsupportedFormatError(f"unknown format {fmt!r} (csv, markdown, json)")
