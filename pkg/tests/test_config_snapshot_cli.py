import csv
import json

import numpy as np
import pytest

from hcan.cli import main
from hcan.config import RunConfig, config_from_dict, load_config, parse_config
from hcan.errors import CompatibilityError, ConfigError, SnapshotFormatError
from hcan.hierlabel import parse_partitions
from hcan.model import AblationFlags
from hcan.pipeline import load_snapshot, save_snapshot, train
from hcan.synthetic import seasonal_series, write_csv

SMALL = """
[data]
path = series.csv
lookback = 24
horizon = 6

[model]
hidden = 16

[train]
epochs = 2
batch_size = 16
seed = 11
"""


# ------------------------------------------------------------------ config


def test_ini_round_trip():
    cfg = RunConfig(lr=3e-4, class_counts=(1, 2, 8), flags=AblationFlags(enable_haa=False), out_dir="x")
    back = parse_config(cfg.to_ini())
    assert back == cfg and back.hash() == cfg.hash()
    assert config_from_dict(json.loads(json.dumps(cfg.to_dict()))) == cfg


def test_config_defaults_and_hash():
    assert parse_config("") == RunConfig()
    a, b = parse_config("[train]\nseed = 1\n"), parse_config("[train]\nseed = 2\n")
    assert a.hash() != b.hash() and len(a.hash()) == 16


@pytest.mark.parametrize(
    "text, needle",
    [
        ("[model]\nfoo = 1\n", "model.foo"),
        ("[nope]\nx = 1\n", "nope"),
        ("[model]\nbackbone = tcn\n", "tcn"),
        ("[train]\nlr = fast\n", "lr"),
        ("[ablation]\nenable_uac_fine = false\n", "requires"),
        ("[data]\nratios = 0.5, 0.2, 0.2\n", "sum"),
        ("no section header", "malformed"),
    ],
)
def test_config_errors_name_the_problem(text, needle):
    with pytest.raises(ConfigError) as exc:
        parse_config(text)
    assert needle in str(exc.value)


def test_load_config_missing(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "none.ini")


# ---------------------------------------------------------------- snapshot


@pytest.fixture(scope="module")
def trained():
    cfg = parse_config(SMALL)
    return train(cfg, values=seasonal_series(400, 2, seed=4), names=["a", "b"])


def test_snapshot_round_trip(tmp_path, trained):
    d = trained.data
    path = tmp_path / "s.npz"
    save_snapshot(path, trained.model, trained.config, d.normalizer, d.partitions, d.names)
    snap = load_snapshot(path)
    assert snap.config == trained.config and snap.names == ["a", "b"]
    assert np.array_equal(snap.normalizer.mean, d.normalizer.mean)
    assert np.array_equal(snap.normalizer.std, d.normalizer.std)
    assert snap.partitions == d.partitions
    model = snap.restore_model()
    x = d.test.batch(np.arange(5)).x
    assert np.array_equal(model(x).y_hat.values, trained.model(x).y_hat.values)


def test_snapshot_corruption(tmp_path, trained):
    d = trained.data
    path = tmp_path / "s.npz"
    save_snapshot(path, trained.model, trained.config, d.normalizer, d.partitions, d.names)
    raw = path.read_bytes()
    bad = tmp_path / "bad.npz"
    bad.write_bytes(raw[: len(raw) // 2])
    with pytest.raises(SnapshotFormatError):
        load_snapshot(bad)
    bad.write_bytes(b"not a zip at all")
    with pytest.raises(SnapshotFormatError):
        load_snapshot(bad)
    np.savez(bad, x=np.zeros(2))
    with pytest.raises(SnapshotFormatError):
        load_snapshot(bad)


def test_snapshot_config_mismatch(tmp_path, trained):
    d = trained.data
    path = tmp_path / "s.npz"
    save_snapshot(path, trained.model, trained.config, d.normalizer, d.partitions, d.names)
    snap = load_snapshot(path)
    with pytest.raises(CompatibilityError):
        snap.restore_model(trained.config.with_updates(hidden=8))
    with pytest.raises(CompatibilityError):
        snap.restore_model(trained.config.with_updates(flags=AblationFlags.ablation_rows()[0]))


# --------------------------------------------------------------------- cli


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    write_csv(root / "series.csv", seasonal_series(400, 2, seed=4), ["load", "temp"])
    (root / "run.ini").write_text(SMALL)
    rc = main(["train", "--config", str(root / "run.ini"), "--out", str(root / "out")])
    assert rc == 0
    return root


def test_train_artifacts(workspace):
    out = workspace / "out"
    summary = json.loads((out / "summary.json").read_text())
    assert summary["epochs_run"] == 2 and summary["seed"] == 11
    assert summary["config_hash"] == config_from_dict(summary["config"]).hash()
    with open(out / "epoch_log.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 2 and "val_mse" in rows[0]
    assert (out / "snapshot.npz").exists()


def test_evaluate_reproduces_summary(workspace, capsys):
    out = workspace / "out"
    summary = json.loads((out / "summary.json").read_text())
    capsys.readouterr()
    assert main(["evaluate", "--snapshot", str(out / "snapshot.npz")]) == 0
    line = capsys.readouterr().out.splitlines()[0].split()
    assert float(line[2]) == summary["test_mse"] and float(line[4]) == summary["test_mae"]
    with open(out / "predictions_test.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["window", "step", "pred_load", "pred_temp", "true_load", "true_temp"]
    assert len(rows) - 1 == summary["test_windows"] * 6


def test_evaluate_other_split_and_mismatch(workspace, tmp_path):
    snap = str(workspace / "out" / "snapshot.npz")
    assert main(["evaluate", "--snapshot", snap, "--split", "val", "--out", str(tmp_path)]) == 0
    assert (tmp_path / "predictions_val.csv").exists()
    other = tmp_path / "other.ini"
    other.write_text(SMALL.replace("hidden = 16", "hidden = 8"))
    assert main(["evaluate", "--snapshot", snap, "--config", str(other), "--out", str(tmp_path)]) == 2
    renamed = tmp_path / "renamed.csv"
    write_csv(renamed, seasonal_series(400, 2, seed=4), ["x", "y"])
    assert main(["evaluate", "--snapshot", snap, "--data", str(renamed), "--out", str(tmp_path)]) == 2


def test_inspect_partition(workspace, tmp_path, capsys):
    snap = str(workspace / "out" / "snapshot.npz")
    capsys.readouterr()
    assert main(["inspect-partition", "--snapshot", snap, "--out", str(tmp_path)]) == 0
    text = capsys.readouterr().out
    assert (tmp_path / "partitions.txt").read_text() == text
    assert parse_partitions(text) == load_snapshot(snap).partitions
    hist = [ln.split() for ln in text.splitlines() if ln.startswith("# hist ")]
    # level 0 is a single class holding every training row
    lvl0 = [h for h in hist if h[2] == "0"]
    assert len(lvl0) == 2 and all(len(h) == 5 for h in lvl0)


def test_inspect_partition_uniform_histogram(tmp_path, capsys):
    rng = np.random.default_rng(0)
    write_csv(tmp_path / "series.csv", rng.uniform(size=(1000, 1)), ["u"])
    (tmp_path / "run.ini").write_text(SMALL)
    capsys.readouterr()
    assert main(["inspect-partition", "--config", str(tmp_path / "run.ini")]) == 0
    text = capsys.readouterr().out
    counts = [int(c) for c in next(ln for ln in text.splitlines() if ln.startswith("# hist 2 0")).split()[4:]]
    assert len(counts) == 4 and max(counts) - min(counts) <= 2


def test_exit_codes(workspace, tmp_path, capsys):
    assert main([]) == 1
    bad = tmp_path / "bad.ini"
    bad.write_text("[model]\nbackbone = tcn\n")
    assert main(["train", "--config", str(bad)]) == 1
    assert "tcn" in capsys.readouterr().err
    missing = tmp_path / "missing.ini"
    missing.write_text("[data]\npath = nowhere.csv\n")
    assert main(["train", "--config", str(missing)]) == 2
    junk = tmp_path / "junk.npz"
    junk.write_bytes(b"junk")
    assert main(["evaluate", "--snapshot", str(junk)]) == 2
    assert main(["inspect-partition"]) == 1


@pytest.mark.slow
def test_ablate_writes_six_rows(workspace, tmp_path):
    out = tmp_path / "abl"
    assert main(["ablate", "--config", str(workspace / "run.ini"), "--out", str(out)]) == 0
    with open(out / "ablation.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 6
    full = json.loads((workspace / "out" / "summary.json").read_text())
    assert float(rows[-1]["test_mse"]) == full["test_mse"]
    assert rows[0]["enable_uac_fine"] == "0" and rows[-1]["enable_haa"] == "1"
    assert {r["monotone_trend"] for r in rows} in ({"0"}, {"1"})
