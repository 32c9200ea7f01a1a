import json

import numpy as np
import pytest

from libsquant.classical.linear import fit_ols
from libsquant.cli import main
from libsquant.dataset import (fit_scaler, flat_arrays, load_embedded,
                               parse_csv, split, write_csv)
from libsquant.numerics import make_rng

FAST_TOML = """\
epochs = 12

[overrides.forest]
n_trees = 10

[overrides.gbr]
n_stages = 20
"""


@pytest.fixture()
def fast_config(tmp_path):
    cfg = tmp_path / "fast.toml"
    cfg.write_text(FAST_TOML)
    return str(cfg)


def write_single_element_csv(path, n=20, seed=0):
    """Full-rank-by-construction data: one element, generic intensities."""
    rng = make_rng(seed)
    lines = ["concentration,i1,i2,i3,i4,i5,i6,i7,i8,i9,i10,element"]
    for _ in range(n):
        conc = float(rng.uniform(0.05, 3.0))
        vals = rng.uniform(100.0, 5000.0, size=10)
        lines.append(",".join([repr(conc)] + [repr(float(v)) for v in vals]
                              + ["Si"]))
    path.write_text("\n".join(lines) + "\n")


class TestDataCommand:
    def test_embedded_statistics(self, capsys):
        assert main(["data"]) == 0
        out = capsys.readouterr().out
        assert "42 records, 6 elements, 7 per element" in out
        assert "Si: n=7, concentration 0.097-4.550" in out

    def test_csv_source(self, tmp_path, capsys):
        path = tmp_path / "alloys.csv"
        write_csv(load_embedded(), path)
        assert main(["data", "--data", str(path)]) == 0
        assert "42 records" in capsys.readouterr().out

    def test_missing_file_exits_2(self, tmp_path, capsys):
        code = main(["data", "--data", str(tmp_path / "missing.csv")])
        assert code == 2
        assert "missing.csv" in capsys.readouterr().err

    def test_bad_row_reports_row_number(self, tmp_path, capsys):
        path = tmp_path / "bad.csv"
        path.write_text("concentration,i1,i2,i3,i4,i5,i6,i7,i8,i9,i10,element\n"
                        "1.0,1,2,3,4,5,6,7,8,9,10,Xx\n")
        assert main(["data", "--data", str(path)]) == 2
        assert "row 2" in capsys.readouterr().err


class TestTrainCommand:
    def test_unknown_model_exits_2_listing_names(self, capsys):
        assert main(["train", "--model", "foo"]) == 2
        err = capsys.readouterr().err
        assert "simplernn" in err and "knn" in err

    def test_writes_model_and_loss(self, tmp_path, capsys):
        out = tmp_path / "run"
        code = main(["train", "--model", "simplernn", "--seed", "42",
                     "--epochs", "8", "--out", str(out)])
        assert code == 0
        model_doc = json.loads((out / "simplernn.json").read_text())
        assert model_doc["format"] == "libsquant-model"
        loss_lines = (out / "loss.csv").read_text().strip().split("\n")
        assert loss_lines[0] == "epoch,train_mse,valid_mse"
        assert len(loss_lines) == 9
        assert (out / "loss.svg").exists()

    def test_deterministic_outputs(self, tmp_path):
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        for out in (out_a, out_b):
            assert main(["train", "--model", "gru", "--seed", "42",
                         "--epochs", "6", "--out", str(out)]) == 0
        assert (out_a / "gru.json").read_bytes() == (out_b / "gru.json").read_bytes()
        assert (out_a / "loss.csv").read_bytes() == (out_b / "loss.csv").read_bytes()

    def test_zero_epochs_writes_initial_params(self, tmp_path):
        out = tmp_path / "zero"
        assert main(["train", "--model", "lstm", "--epochs", "0",
                     "--out", str(out)]) == 0
        doc = json.loads((out / "lstm.json").read_text())
        assert doc["loss_history"] == []
        loss_lines = (out / "loss.csv").read_text().strip().split("\n")
        assert loss_lines == ["epoch,train_mse,valid_mse"]

    def test_classical_model_writes_single_loss_row(self, tmp_path):
        out = tmp_path / "knn"
        assert main(["train", "--model", "knn", "--out", str(out)]) == 0
        loss_lines = (out / "loss.csv").read_text().strip().split("\n")
        assert len(loss_lines) == 2 and loss_lines[1].startswith("0,")


class TestBenchmarkCommand:
    def test_subset_and_artifacts(self, tmp_path, capsys):
        out = tmp_path / "bench"
        code = main(["benchmark", "--models", "knn,tree,simplernn",
                     "--epochs", "8", "--out", str(out)])
        assert code == 0
        summary = (out / "summary.csv").read_text().strip().split("\n")
        assert len(summary) == 4
        report = json.loads((out / "report.json").read_text())
        assert report["format"] == "libsquant-report"
        assert {m["name"] for m in report["models"]} == {"knn", "tree", "simplernn"}
        for name in ("scatter_knn.svg", "scatter_tree.svg",
                     "scatter_simplernn.svg"):
            assert (out / name).exists()

    def test_rerun_same_seed_identical_summary(self, tmp_path, fast_config):
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        args = ["benchmark", "--models", "knn,gru", "--config", fast_config,
                "--seed", "7"]
        assert main(args + ["--out", str(out_a)]) == 0
        assert main(args + ["--out", str(out_b)]) == 0
        assert (out_a / "summary.csv").read_bytes() == \
            (out_b / "summary.csv").read_bytes()
        assert (out_a / "report.json").read_bytes() == \
            (out_b / "report.json").read_bytes()

    def test_flags_override_config_file(self, tmp_path):
        cfg = tmp_path / "cfg.toml"
        cfg.write_text('seed = 1\nmodels = ["knn"]\n')
        out = tmp_path / "o"
        assert main(["benchmark", "--config", str(cfg), "--models", "tree",
                     "--out", str(out)]) == 0
        summary = (out / "summary.csv").read_text()
        assert "tree" in summary and "knn" not in summary

    def test_seed_env_fallback(self, tmp_path, monkeypatch, capsys):
        monkeypatch.setenv("LIBSQUANT_SEED", "abc")
        assert main(["benchmark", "--models", "knn",
                     "--out", str(tmp_path / "x")]) == 2
        assert "LIBSQUANT_SEED" in capsys.readouterr().err


class TestLassoPathCommand:
    def test_default_grid_outputs(self, tmp_path):
        out = tmp_path / "lasso"
        assert main(["lasso-path", "--out", str(out)]) == 0
        lines = (out / "path.csv").read_text().strip().split("\n")
        header = lines[0].split(",")
        assert len(header) == 17
        assert header[0] == "lambda" and header[1] == "coef_i1"
        assert header[11] == "coef_Si" and header[16] == "coef_Mg"
        assert len(lines) == 51
        first_row = [float(v) for v in lines[1].split(",")]
        assert all(v == 0.0 for v in first_row[1:])
        assert (out / "lasso_path.svg").exists()

    def test_zero_lambda_matches_ols_on_full_rank_data(self, tmp_path):
        csv_path = tmp_path / "single.csv"
        write_single_element_csv(csv_path)
        out = tmp_path / "l0"
        assert main(["lasso-path", "--data", str(csv_path), "--lambdas", "0",
                     "--out", str(out)]) == 0
        lines = (out / "path.csv").read_text().strip().split("\n")
        coefs = np.array([float(v) for v in lines[1].split(",")][1:])

        ds = parse_csv(csv_path)
        train_ds, _ = split(ds, 0.2, 42)
        scaler = fit_scaler(train_ds)
        X, y = flat_arrays(train_ds, scaler)
        ols = fit_ols(X, y)
        # intensity block is identified; the constant one-hot block is not
        np.testing.assert_allclose(coefs[:10], ols.coef[:10], atol=1e-6)

    def test_bad_lambda_list_exits_2(self, tmp_path, capsys):
        assert main(["lasso-path", "--lambdas", "0.1,zebra",
                     "--out", str(tmp_path / "x")]) == 2


class TestUsage:
    def test_no_command_exits_2(self):
        assert main([]) == 2

    def test_unknown_flag_exits_2(self):
        assert main(["data", "--frobnicate"]) == 2

    def test_help_exits_0(self):
        assert main(["--help"]) == 0
