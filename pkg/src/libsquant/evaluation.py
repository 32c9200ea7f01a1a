"""Error metrics and the benchmark runner producing the comparison tables.

Metrics are reported on two scales: normalized (targets mapped to [0, 1]
by the training min/max, the scale on which models are fitted and compared)
and raw weight-percent. The runner shares one seeded split across every
model in the suite, then trains, predicts, and scores each one; a model
failure is recorded in its row instead of aborting the rest.
"""

import json
import time
from dataclasses import dataclass

import numpy as np

from .dataset import ELEMENTS, fit_scaler, split
from .models import MODEL_NAMES, UnknownModelError, train_model


def _check_lengths(y, y_hat):
    y = np.asarray(y, dtype=np.float64)
    y_hat = np.asarray(y_hat, dtype=np.float64)
    if y.shape != y_hat.shape or y.ndim != 1:
        raise ValueError(f"length mismatch: {y.shape} vs {y_hat.shape}")
    if len(y) == 0:
        raise ValueError("need at least one sample")
    return y, y_hat


def mse(y, y_hat):
    """Mean squared error."""
    y, y_hat = _check_lengths(y, y_hat)
    return float(np.mean((y - y_hat) ** 2))


def mae(y, y_hat):
    """Mean absolute error."""
    y, y_hat = _check_lengths(y, y_hat)
    return float(np.mean(np.abs(y - y_hat)))


def mape(y, y_hat):
    """Mean absolute percentage error, reported as a fraction."""
    y, y_hat = _check_lengths(y, y_hat)
    if np.any(y == 0.0):
        raise ValueError("mape is undefined for zero targets")
    return float(np.mean(np.abs((y - y_hat) / y)))


def correlation_slope(nominal, predicted):
    """Least-squares line predicted ~ slope * nominal + intercept."""
    nominal, predicted = _check_lengths(nominal, predicted)
    if len(nominal) < 2:
        raise ValueError("need at least two points")
    var = np.var(nominal)
    if var == 0.0:
        raise ValueError("nominal values have zero variance")
    cov = np.mean((nominal - nominal.mean()) * (predicted - predicted.mean()))
    slope = cov / var
    return float(slope), float(predicted.mean() - slope * nominal.mean())


@dataclass(frozen=True)
class MetricSet:
    """The three errors on both target scales for one prediction set."""

    mse_norm: float
    mae_norm: float
    mape_norm: float
    mse_raw: float
    mae_raw: float
    mape_raw: float
    n: int

    def to_dict(self):
        return {"mse_norm": self.mse_norm, "mae_norm": self.mae_norm,
                "mape_norm": self.mape_norm, "mse_raw": self.mse_raw,
                "mae_raw": self.mae_raw, "mape_raw": self.mape_raw,
                "n": self.n}


def compute_metric_set(raw_targets, raw_predictions, scaler):
    y_norm = scaler.normalize_target(raw_targets)
    p_norm = scaler.normalize_target(raw_predictions)
    return MetricSet(
        mse_norm=mse(y_norm, p_norm), mae_norm=mae(y_norm, p_norm),
        mape_norm=mape(y_norm, p_norm),
        mse_raw=mse(raw_targets, raw_predictions),
        mae_raw=mae(raw_targets, raw_predictions),
        mape_raw=mape(raw_targets, raw_predictions),
        n=len(raw_targets))


@dataclass
class ModelResult:
    name: str
    hyperparams: dict
    metrics: MetricSet | None
    per_element: dict          # element -> MetricSet
    macro_norm: dict | None    # per-element means of the normalized metrics
    slope: float | None
    intercept: float | None
    predictions: np.ndarray | None   # raw wt%, test order
    targets: np.ndarray | None
    seconds: float
    error: str | None = None

    def to_dict(self):
        return {
            "name": self.name,
            "hyperparams": self.hyperparams,
            "metrics": self.metrics.to_dict() if self.metrics else None,
            "per_element": {e: m.to_dict() for e, m in self.per_element.items()},
            "macro_norm": self.macro_norm,
            "slope": self.slope,
            "intercept": self.intercept,
            "predictions": None if self.predictions is None else list(self.predictions),
            "targets": None if self.targets is None else list(self.targets),
            "error": self.error,
        }


@dataclass
class EvaluationReport:
    """Everything one benchmark run produced, reproducible from its seed.

    Wall-clock per model is kept on the result rows but excluded from the
    canonical JSON so that identical configurations serialize to identical
    bytes; pass include_timings=True to to_json for profiling output.
    """

    seed: int
    test_fraction: float
    repeats: int
    n_train: int
    n_test: int
    results: list                  # ModelResult, suite order, primary seed
    repeat_mse_norm: dict          # name -> [per-repeat mse_norm or None]
    repeat_seeds: list
    median_mse_norm: dict          # name -> median over successful repeats

    def result(self, name):
        for r in self.results:
            if r.name == name:
                return r
        raise KeyError(name)

    def to_dict(self, include_timings=False):
        d = {
            "format": "libsquant-report",
            "version": 1,
            "seed": self.seed,
            "test_fraction": self.test_fraction,
            "repeats": self.repeats,
            "repeat_seeds": list(self.repeat_seeds),
            "split": {"n_train": self.n_train, "n_test": self.n_test},
            "models": [r.to_dict() for r in self.results],
            "repeat_mse_norm": self.repeat_mse_norm,
            "median_mse_norm": self.median_mse_norm,
        }
        if include_timings:
            d["seconds"] = {r.name: r.seconds for r in self.results}
        return d

    def to_json(self, include_timings=False):
        return json.dumps(self.to_dict(include_timings), indent=2,
                          sort_keys=True) + "\n"


SUMMARY_COLUMNS = ("model", "mse_norm", "mae_norm", "mape_norm",
                   "mse_raw", "mae_raw", "mape_raw", "slope")


def summary_csv(report):
    """Flat one-row-per-model CSV mirroring the comparison tables."""
    lines = [",".join(SUMMARY_COLUMNS)]
    for r in report.results:
        if r.metrics is None:
            lines.append(",".join([r.name] + [""] * 7))
            continue
        m = r.metrics
        lines.append(",".join([r.name] + [repr(v) for v in (
            m.mse_norm, m.mae_norm, m.mape_norm,
            m.mse_raw, m.mae_raw, m.mape_raw, r.slope)]))
    return "\n".join(lines) + "\n"


def _evaluate_model(name, train_ds, test_ds, scaler, seed, overrides):
    t0 = time.perf_counter()
    params = {}
    try:
        model = train_model(name, train_ds, scaler, seed=seed,
                            overrides=overrides)
        params = model.hyperparams
        targets = np.array([r.concentration for r in test_ds])
        predictions = model.predict_many(test_ds.records)
        metrics = compute_metric_set(targets, predictions, scaler)
        per_element = {}
        macro_acc = {"mse_norm": [], "mae_norm": [], "mape_norm": []}
        for element in ELEMENTS:
            idx = [i for i, r in enumerate(test_ds) if r.element == element]
            if not idx:
                continue
            ms = compute_metric_set(targets[idx], predictions[idx], scaler)
            per_element[element] = ms
            macro_acc["mse_norm"].append(ms.mse_norm)
            macro_acc["mae_norm"].append(ms.mae_norm)
            macro_acc["mape_norm"].append(ms.mape_norm)
        macro = {k: float(np.mean(v)) for k, v in macro_acc.items()}
        slope, intercept = correlation_slope(targets, predictions)
        return ModelResult(name, params, metrics, per_element, macro,
                           slope, intercept, predictions, targets,
                           time.perf_counter() - t0)
    except UnknownModelError:
        raise
    except Exception as exc:  # recorded per model, not fatal to the suite
        return ModelResult(name, params, None, {}, None, None, None,
                           None, None, time.perf_counter() - t0,
                           error=f"{type(exc).__name__}: {exc}")


def run_benchmark(dataset, suite=None, seed=42, test_fraction=0.2, repeats=1,
                  overrides=None):
    """Train and score a suite of models on one shared seeded split.

    With repeats > 1 the whole protocol is re-run on derived seeds
    (seed + r) and per-repeat normalized MSEs plus their medians are
    reported alongside the primary run. overrides maps model name ->
    hyperparameter overrides.
    """
    suite = list(suite) if suite else list(MODEL_NAMES)
    for name in suite:
        if name not in MODEL_NAMES:
            raise UnknownModelError(name)
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    overrides = overrides or {}

    repeat_seeds = [seed + r for r in range(repeats)]
    repeat_mse = {name: [] for name in suite}
    primary_results = None
    n_train = n_test = 0
    for rseed in repeat_seeds:
        train_ds, test_ds = split(dataset, test_fraction, rseed)
        scaler = fit_scaler(train_ds)
        results = [_evaluate_model(name, train_ds, test_ds, scaler, rseed,
                                   overrides.get(name))
                   for name in suite]
        for res in results:
            repeat_mse[res.name].append(
                res.metrics.mse_norm if res.metrics else None)
        if rseed == seed:
            primary_results = results
            n_train, n_test = len(train_ds), len(test_ds)

    medians = {}
    for name, values in repeat_mse.items():
        ok = [v for v in values if v is not None]
        medians[name] = float(np.median(ok)) if ok else None
    return EvaluationReport(seed, test_fraction, repeats, n_train, n_test,
                            primary_results, repeat_mse, repeat_seeds, medians)
