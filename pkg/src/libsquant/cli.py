"""Command-line interface.

Subcommands: data (dataset statistics), train (one model + loss history),
benchmark (full comparison with figures), lasso-path (coefficient path).
Options can come from flags or a TOML config file; flags win. Exit codes:
0 success, 1 runtime failure, 2 usage or parse error.
"""

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from . import plots
from .classical import default_lambda_grid, lasso_path
from .dataset import (ELEMENTS, DatasetError, FLAT_FEATURE_NAMES, fit_scaler,
                      flat_arrays, load_embedded, parse_csv, split)
from .evaluation import run_benchmark, summary_csv
from .models import (MODEL_NAMES, NEURAL_NAMES, UnknownModelError,
                     model_to_dict, train_model)

DEFAULT_SEED = 42
DEFAULT_TEST_FRACTION = 0.2
SEED_ENV_VAR = "LIBSQUANT_SEED"


class CliError(Exception):
    """Usage-level problem; maps to exit code 2."""


@dataclass
class RunConfig:
    data: str = "embedded"
    seed: int = DEFAULT_SEED
    test_fraction: float = DEFAULT_TEST_FRACTION
    out: str = "out"
    models: list | None = None
    epochs: int | None = None
    repeats: int = 1
    overrides: dict = field(default_factory=dict)


def _load_config_file(path):
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except OSError as exc:
        raise CliError(f"cannot read config {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise CliError(f"bad TOML in {path}: {exc}") from exc


def build_config(args):
    """Merge defaults, the optional TOML file, the seed env var, and flags."""
    cfg = RunConfig()
    file_cfg = _load_config_file(args.config) if args.config else {}

    def pick(flag_value, key, fallback):
        if flag_value is not None:
            return flag_value
        if key in file_cfg:
            return file_cfg[key]
        return fallback

    env_seed = os.environ.get(SEED_ENV_VAR)
    seed_fallback = cfg.seed
    if env_seed is not None:
        try:
            seed_fallback = int(env_seed)
        except ValueError:
            raise CliError(f"{SEED_ENV_VAR} must be an integer, got {env_seed!r}")

    cfg.data = str(pick(args.data, "data", cfg.data))
    cfg.seed = int(pick(args.seed, "seed", seed_fallback))
    cfg.test_fraction = float(pick(args.test_fraction, "test_fraction",
                                   cfg.test_fraction))
    cfg.out = str(pick(args.out, "out", cfg.out))
    models = pick(getattr(args, "models", None), "models", None)
    if isinstance(models, str):
        models = [m.strip() for m in models.split(",") if m.strip()]
    cfg.models = models
    epochs = pick(getattr(args, "epochs", None), "epochs", None)
    cfg.epochs = None if epochs is None else int(epochs)
    cfg.repeats = int(pick(getattr(args, "repeats", None), "repeats", 1))
    overrides = file_cfg.get("overrides", {})
    if not isinstance(overrides, dict):
        raise CliError("config [overrides] must be a table of model tables")
    cfg.overrides = {name: dict(table) for name, table in overrides.items()}
    if cfg.epochs is not None:
        for name in NEURAL_NAMES:
            cfg.overrides.setdefault(name, {})["epochs"] = cfg.epochs
    return cfg


def load_dataset(cfg):
    if cfg.data == "embedded":
        return load_embedded()
    if not Path(cfg.data).exists():
        raise CliError(f"data file not found: {cfg.data}")
    return parse_csv(cfg.data)


def _outdir(cfg):
    path = Path(cfg.out)
    path.mkdir(parents=True, exist_ok=True)
    return path


# -- subcommands -------------------------------------------------------------

def cmd_data(cfg):
    ds = load_dataset(cfg)
    counts = ds.element_counts()
    present = [e for e in ELEMENTS if counts[e]]
    uniform = len({counts[e] for e in present}) == 1
    if uniform and present:
        per = f"{counts[present[0]]} per element"
    else:
        per = ", ".join(f"{e}:{counts[e]}" for e in present)
    print(f"{len(ds)} records, {len(present)} elements, {per}")
    print(f"source: {ds.provenance}")
    for e in present:
        concs = [r.concentration for r in ds if r.element == e]
        print(f"  {e}: n={counts[e]}, concentration {min(concs):.3f}-{max(concs):.3f} wt%")
    return 0


def cmd_train(cfg, model_name):
    if model_name not in MODEL_NAMES:
        raise CliError(f"unknown model {model_name!r}; valid names: "
                       + ", ".join(MODEL_NAMES))
    ds = load_dataset(cfg)
    train_ds, test_ds = split(ds, cfg.test_fraction, cfg.seed)
    scaler = fit_scaler(train_ds)
    model = train_model(model_name, train_ds, scaler, seed=cfg.seed,
                        overrides=cfg.overrides.get(model_name))
    out = _outdir(cfg)
    model_path = out / f"{model_name}.json"
    with open(model_path, "w", encoding="utf-8") as fh:
        json.dump(model_to_dict(model), fh, indent=2, sort_keys=True)
        fh.write("\n")

    loss_path = out / "loss.csv"
    with open(loss_path, "w", encoding="utf-8") as fh:
        fh.write("epoch,train_mse,valid_mse\n")
        if model.loss_history is not None:
            for epoch, (tr, va) in enumerate(model.loss_history, start=1):
                fh.write(f"{epoch},{tr!r},{va!r}\n")
        else:
            # classical fits have no epochs; record the final errors once
            _, ytr = flat_arrays(train_ds, scaler)
            tr_mse = float(np.mean((model.predict_normalized(train_ds.records) - ytr) ** 2))
            if len(test_ds):
                yte = scaler.normalize_target(
                    np.array([r.concentration for r in test_ds]))
                va_mse = float(np.mean(
                    (model.predict_normalized(test_ds.records) - yte) ** 2))
            else:
                va_mse = tr_mse
            fh.write(f"0,{tr_mse!r},{va_mse!r}\n")
    if model.loss_history:
        plots.loss_curve_figure(model.loss_history, model_name,
                                out / "loss.svg")
    print(f"wrote {model_path} and {loss_path}")
    return 0


def cmd_benchmark(cfg):
    ds = load_dataset(cfg)
    suite = cfg.models or list(MODEL_NAMES)
    report = run_benchmark(ds, suite=suite, seed=cfg.seed,
                           test_fraction=cfg.test_fraction,
                           repeats=cfg.repeats, overrides=cfg.overrides)
    out = _outdir(cfg)
    with open(out / "report.json", "w", encoding="utf-8") as fh:
        fh.write(report.to_json())
    with open(out / "summary.csv", "w", encoding="utf-8") as fh:
        fh.write(summary_csv(report))

    n_ok = 0
    for res in report.results:
        if res.error is not None:
            print(f"  {res.name}: FAILED ({res.error})", file=sys.stderr)
            continue
        n_ok += 1
        plots.scatter_predicted_vs_nominal(
            res.targets, res.predictions, res.name, res.slope, res.intercept,
            out / f"scatter_{res.name.replace('-', '_')}.svg")
        print(f"  {res.name:15s} mse_norm={res.metrics.mse_norm:.6f} "
              f"slope={res.slope:+.3f} ({res.seconds:.1f}s)")
    print(f"wrote {out / 'report.json'}, {out / 'summary.csv'}, "
          f"{n_ok} scatter figures")
    return 0 if n_ok else 1


def cmd_lasso_path(cfg, lambdas_arg, n_lambdas, min_ratio):
    ds = load_dataset(cfg)
    train_ds, _ = split(ds, cfg.test_fraction, cfg.seed)
    scaler = fit_scaler(train_ds)
    X, y = flat_arrays(train_ds, scaler)
    if lambdas_arg:
        try:
            lambdas = np.array([float(v) for v in lambdas_arg.split(",")])
        except ValueError as exc:
            raise CliError(f"bad --lambdas value: {exc}") from exc
    else:
        lambdas = default_lambda_grid(X, y, n_points=n_lambdas,
                                      min_ratio=min_ratio)

    out = _outdir(cfg)
    path = lasso_path(X, y, lambdas, feature_names=FLAT_FEATURE_NAMES)
    for lam in path.failures:
        print(f"  warning: no convergence at lambda={lam:g}", file=sys.stderr)

    csv_path = out / "path.csv"
    with open(csv_path, "w", encoding="utf-8") as fh:
        fh.write("lambda," + ",".join(f"coef_{n}" for n in path.feature_names) + "\n")
        for li in range(len(path.lambdas)):
            row = [repr(float(path.lambdas[li]))]
            row += [repr(float(v)) for v in path.coefs[li]]
            fh.write(",".join(row) + "\n")
    plots.lasso_path_figure(path, out / "lasso_path.svg")
    print(f"wrote {csv_path} and {out / 'lasso_path.svg'}")
    return 0


# -- argument parsing --------------------------------------------------------

def _common_flags(p):
    p.add_argument("--data", help="'embedded' (default) or a CSV path")
    p.add_argument("--seed", type=int,
                   help=f"RNG seed (default 42; ${SEED_ENV_VAR} as fallback)")
    p.add_argument("--test-fraction", type=float, dest="test_fraction",
                   help="held-out fraction (default 0.2)")
    p.add_argument("--out", help="output directory (default ./out)")
    p.add_argument("--config", help="TOML config file; flags override it")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="libsquant",
        description="LIBS concentration prediction: recurrent nets vs "
                    "classical regressors.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("data", help="show dataset statistics")
    _common_flags(p)

    p = sub.add_parser("train", help="train one model, write JSON + loss.csv")
    _common_flags(p)
    p.add_argument("--model", required=True, help="one of: " + ", ".join(MODEL_NAMES))
    p.add_argument("--epochs", type=int, help="override training epochs")

    p = sub.add_parser("benchmark", help="run the model comparison")
    _common_flags(p)
    p.add_argument("--models", help="comma-separated subset (default: all 13)")
    p.add_argument("--epochs", type=int, help="override neural training epochs")
    p.add_argument("--repeats", type=int, help="repeat seeds for medians (default 1)")

    p = sub.add_parser("lasso-path", help="export the lasso coefficient path")
    _common_flags(p)
    p.add_argument("--lambdas", help="explicit comma-separated penalty values")
    p.add_argument("--n-lambdas", type=int, default=50, dest="n_lambdas",
                   help="grid size when --lambdas is not given (default 50)")
    p.add_argument("--min-ratio", type=float, default=1e-2, dest="min_ratio",
                   help="grid floor as a fraction of lambda_max (default 1e-2)")
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = build_config(args)
        if args.command == "data":
            return cmd_data(cfg)
        if args.command == "train":
            return cmd_train(cfg, args.model)
        if args.command == "benchmark":
            return cmd_benchmark(cfg)
        if args.command == "lasso-path":
            return cmd_lasso_path(cfg, args.lambdas, args.n_lambdas,
                                  args.min_ratio)
        raise CliError(f"unknown command {args.command!r}")
    except (CliError, DatasetError, UnknownModelError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # runtime failure
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
