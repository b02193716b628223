import json
import subprocess
import sys

import numpy as np
import pytest

from tfcr.cli import main
from tfcr.clf import load_model
from tfcr.represent import load_feature_matrix
from tfcr.weights import load_weight_table


def test_weights_repr_train_eval(separable_files, tmp_path, capsys):
    data, emb = separable_files
    assert main(["weights", "--dataset", str(data), "--scheme", "tfcr", "--out", str(tmp_path / "w.tsv")]) == 0
    table = load_weight_table(tmp_path / "w.tsv")
    assert table.scheme == "tfcr" and table.label_set.labels == ("alpha", "beta")

    assert main(["repr", "--dataset", str(data), "--embeddings", str(emb), "--weights", str(tmp_path / "w.tsv"),
                 "--out", str(tmp_path / "f.tsv")]) == 0
    X, labels = load_feature_matrix(tmp_path / "f.tsv")
    assert X.shape == (500, 40) and labels[:2] == ["alpha", "beta"]

    assert main(["repr", "--dataset", str(data), "--embeddings", str(emb), "--baseline", "sum",
                 "--out", str(tmp_path / "b.tsv")]) == 0
    assert load_feature_matrix(tmp_path / "b.tsv")[0].shape == (500, 20)

    assert main(["train", "--features", str(tmp_path / "f.tsv"), "--out", str(tmp_path / "m.txt"),
                 "--epochs", "50"]) == 0
    assert load_model(tmp_path / "m.txt").W.shape == (2, 40)

    capsys.readouterr()
    assert main(["eval", "--model", str(tmp_path / "m.txt"), "--features", str(tmp_path / "f.tsv")]) == 0
    score = float(capsys.readouterr().out.split("\t")[1])
    assert score >= 0.95


def test_run_command(separable_files, tmp_path):
    data, emb = separable_files
    cfg = tmp_path / "exp.yaml"
    cfg.write_text(f"dataset: {data}\nembeddings: {emb}\nschemes: [none, tfcr]\nsizes: [40, 80]\n"
                   "n_folds: 2\ntrain: {max_epochs: 30}\noutput_dir: out\n")
    assert main(["--seed", "5", "--jobs", "2", "run", "--config", str(cfg)]) == 0
    manifest = json.loads((tmp_path / "out" / "manifest.json").read_text())
    assert manifest["base_seed"] == 5 and manifest["jobs"] == 2
    assert (tmp_path / "out" / "curve_tfcr.csv").exists()


def test_run_exit_code_on_failed_cells(tmp_path):
    # sizes of 1 give single-class training sets, so every cell fails
    (tmp_path / "d.tsv").write_text("".join(f"{'ab'[i % 2]}\tw{i % 2}\n" for i in range(8)))
    (tmp_path / "v.txt").write_text("w0 1 0\nw1 0 1\n")
    (tmp_path / "exp.yaml").write_text("dataset: d.tsv\nembeddings: v.txt\nschemes: [tfcr]\nsizes: [1]\n"
                                       "n_folds: 2\noutput_dir: out\n")
    assert main(["run", "--config", str(tmp_path / "exp.yaml")]) == 1
    manifest = json.loads((tmp_path / "out" / "manifest.json").read_text())
    assert len(manifest["failures"]) == 2


def test_bad_input_reports_error(tmp_path, capsys):
    (tmp_path / "d.tsv").write_text("a\tx\ty\n")
    assert main(["weights", "--dataset", str(tmp_path / "d.tsv"), "--scheme", "tfcr",
                 "--out", str(tmp_path / "w.tsv")]) == 2
    assert "line 1" in capsys.readouterr().err


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "tfcr", "--version"], capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout.startswith("tfcr ")
