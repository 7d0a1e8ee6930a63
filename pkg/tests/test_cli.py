import json

import numpy as np
import pytest

import commands.train
from dataio.storage import load_dataset, save_dataset
from dataio.synthetic import generate_synthetic
from decoupler.checkpoint import load_checkpoint, save_checkpoint
from evaluation.metrics import tradeoff_curve
from evaluation.records import POINT_COLUMNS, read_points_csv, write_points_csv
from main import main
from schemas.evaluation import TradeoffPoint
from utils.errors import NumericError

from tests.conftest import tiny_decoupler_config, tiny_eval_config, tiny_synth


def write_config(path, **extra):
    payload = {
        "data": tiny_synth().model_dump(mode="json"),
        "decoupler": tiny_decoupler_config().model_dump(mode="json"),
        "eval": tiny_eval_config().model_dump(mode="json"),
    }
    payload.update(extra)
    path.write_text(json.dumps(payload))
    return str(path)


@pytest.fixture
def workspace(tmp_path, tiny_data, decoupler):
    save_dataset(tiny_data, tmp_path / "data")
    save_checkpoint(tmp_path / "decoupler.ckpt", decoupler)
    return tmp_path


def test_gen_data_writes_a_loadable_dataset(tmp_path, capsys):
    config = write_config(tmp_path / "config.json")
    code = main(["gen-data", "--config", config, "--out", str(tmp_path / "data"), "--seed", "3", "--split"])
    assert code == 0
    data = load_dataset(tmp_path / "data")
    assert data.n == 160
    aux, private = load_dataset(tmp_path / "data" / "aux"), load_dataset(tmp_path / "data" / "private")
    assert aux.n + private.n == 160
    summary = json.loads(capsys.readouterr().out)
    assert summary["n"] == 160 and summary["seed"] == 3
    echoed = json.loads((tmp_path / "data" / "config.json").read_text())
    assert echoed["seed"] == 3 and "sweep-grid" in echoed


def test_malformed_json_exits_with_config_error(tmp_path, caplog):
    bad = tmp_path / "bad.json"
    bad.write_text('{"data": {"n": 10,}}')
    assert main(["gen-data", "--config", str(bad), "--out", str(tmp_path / "out")]) == 2
    assert "line 1" in caplog.text


def test_unknown_key_is_named_in_the_diagnostic(tmp_path, caplog):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"data": {"bogus": 1}}))
    assert main(["gen-data", "--config", str(config), "--out", str(tmp_path / "out")]) == 2
    assert "data.bogus" in caplog.text


def test_missing_dataset_exits_with_io_error(tmp_path):
    code = main(["train", "--data", str(tmp_path / "nowhere"), "--out", str(tmp_path / "model")])
    assert code == 3


def test_train_writes_checkpoint_and_losses(workspace, capsys):
    config = write_config(workspace / "config.json")
    out = workspace / "model"
    assert main(["train", "--data", str(workspace / "data"), "--config", config, "--out", str(out)]) == 0
    params = load_checkpoint(out / "decoupler.ckpt")
    assert params.k == 2 and params.m == 6
    lines = (out / "losses.csv").read_text().splitlines()
    assert lines[0] == "epoch,L1,L2,L3,L4,joint"
    assert len(lines) == 1 + 2
    assert "aligner_accuracy" in capsys.readouterr().out


def test_train_numeric_failure_keeps_last_good_checkpoint(workspace, decoupler, monkeypatch):
    def explode(config, aux, rng, on_epoch_end=None, init=None):
        raise NumericError("joint loss became non-finite at epoch 1 step 0", decoupler)

    monkeypatch.setattr(commands.train, "train_decoupler", explode)
    out = workspace / "model"
    config = write_config(workspace / "config.json")
    assert main(["train", "--data", str(workspace / "data"), "--config", config, "--out", str(out)]) == 4
    assert load_checkpoint(out / "decoupler.ckpt").class_counts == decoupler.class_counts


def test_dp_sample_without_epsilon_exits_with_mechanism_error(workspace):
    config = write_config(workspace / "config.json")
    code = main(["sanitize", "--data", str(workspace / "data"), "--model", str(workspace / "decoupler.ckpt"),
                 "--mechanism", "dp-sample", "--config", config, "--out", str(workspace / "sanitized")])
    assert code == 5


def test_non_positive_epsilon_is_rejected(workspace):
    code = main(["sanitize", "--data", str(workspace / "data"), "--model", str(workspace / "decoupler.ckpt"),
                 "--mechanism", "obfuscate", "--epsilon", "0", "--out", str(workspace / "sanitized")])
    assert code == 5


def test_dp_sample_on_a_class_with_one_member_exits_with_mechanism_error(tmp_path, decoupler):
    data = generate_synthetic(tiny_synth(n=40, sensitive_weights=[0.97, 0.01, 0.01, 0.01]), 0)
    save_dataset(data, tmp_path / "data")
    save_checkpoint(tmp_path / "decoupler.ckpt", decoupler)
    counts = np.bincount(data.column("sensitive"), minlength=4)
    assert counts.min() < 2
    code = main(["sanitize", "--data", str(tmp_path / "data"), "--model", str(tmp_path / "decoupler.ckpt"),
                 "--mechanism", "dp-sample", "--epsilon", "1", "--out", str(tmp_path / "sanitized")])
    assert code == 5


def test_sanitize_then_evaluate(workspace, capsys):
    config = write_config(workspace / "config.json")
    sanitized = workspace / "sanitized"
    code = main(["sanitize", "--data", str(workspace / "data"), "--model", str(workspace / "decoupler.ckpt"),
                 "--mechanism", "dp-sample", "--epsilon", "1.0", "--config", config, "--out", str(sanitized)])
    assert code == 0
    echoed = json.loads((sanitized / "config.json").read_text())
    assert echoed["epsilon"] == 1.0 and echoed["mechanism_used"] == "dp-sample"
    capsys.readouterr()

    report_dir = workspace / "report"
    code = main(["evaluate", "--sanitized", str(sanitized), "--aux", str(workspace / "data"),
                 "--clean-test", str(workspace / "data"), "--cas", "--e5", "--config", config,
                 "--out", str(report_dir)])
    assert code == 0
    report = json.loads((report_dir / "report.json").read_text())
    assert report["report_version"] == 1
    assert report["mechanism"] == "dp-sample"
    assert report["leakage_delta"] == pytest.approx(report["leakage_acc"] - report["prior_acc"])
    assert report["e5_receiver_acc"] is not None and report["cas_acc"] is not None


def test_evaluate_e5_on_suppression_exits_with_mechanism_error(workspace):
    config = write_config(workspace / "config.json")
    sanitized = workspace / "sanitized"
    assert main(["sanitize", "--data", str(workspace / "data"), "--model", str(workspace / "decoupler.ckpt"),
                 "--mechanism", "suppress", "--out", str(sanitized)]) == 0
    code = main(["evaluate", "--sanitized", str(sanitized), "--aux", str(workspace / "data"),
                 "--clean-test", str(workspace / "data"), "--e5", "--config", config,
                 "--out", str(workspace / "report")])
    assert code == 5


def test_evaluate_schema_mismatch_exits_with_config_error(workspace):
    save_dataset(generate_synthetic(tiny_synth(image_size=(4, 4, 3)), 0), workspace / "other")
    sanitized = workspace / "sanitized"
    assert main(["sanitize", "--data", str(workspace / "data"), "--model", str(workspace / "decoupler.ckpt"),
                 "--mechanism", "suppress", "--out", str(sanitized)]) == 0
    code = main(["evaluate", "--sanitized", str(sanitized), "--aux", str(workspace / "other"),
                 "--out", str(workspace / "report")])
    assert code == 2


def test_empty_sweep_writes_a_header_only_csv(workspace):
    config = write_config(workspace / "config.json")
    out = workspace / "sweep"
    assert main(["sweep", "--data", str(workspace / "data"), "--config", config, "--out", str(out)]) == 0
    assert (out / "points.csv").read_text() == ",".join(POINT_COLUMNS) + "\n"
    assert json.loads((out / "failures.json").read_text()) == []


def test_plot_prints_the_harness_auc(tmp_path, capsys):
    points = [
        TradeoffPoint(config_id="a", seed=0, mechanism="dp-sample", epsilon=1.0,
                      leakage_acc=0.5, prior_acc=0.25, utility_acc=0.7),
        TradeoffPoint(config_id="b", seed=0, mechanism="suppress", leakage_acc=0.3, prior_acc=0.27,
                      utility_acc=0.6),
    ]
    write_points_csv(tmp_path / "points.csv", points)
    out = tmp_path / "plot"
    assert main(["plot", "--points", str(tmp_path / "points.csv"), "--out", str(out)]) == 0
    expected = tradeoff_curve(read_points_csv(tmp_path / "points.csv"), 0.25, 0.5).auc
    assert capsys.readouterr().out.strip() == f"auc={expected!r}"
    assert (out / "tradeoff.svg").exists()
    assert (out / "pareto.csv").read_text().splitlines()[0] == "config_id,seed,mechanism,leakage_acc,utility_acc"


def test_unknown_subcommand_is_rejected():
    with pytest.raises(SystemExit):
        main(["explode"])


def tree_bytes(root):
    return {str(path.relative_to(root)): path.read_bytes() for path in sorted(root.rglob("*")) if path.is_file()}


def test_gen_data_reruns_are_byte_identical(tmp_path):
    config = write_config(tmp_path / "config.json")
    for name in ("first", "second"):
        argv = ["gen-data", "--config", config, "--out", str(tmp_path / name), "--seed", "5", "--split"]
        assert main(argv) == 0
    first = tree_bytes(tmp_path / "first")
    assert first and first == tree_bytes(tmp_path / "second")


def test_train_reruns_are_byte_identical(workspace):
    config = write_config(workspace / "config.json")
    for name in ("first", "second"):
        argv = ["train", "--data", str(workspace / "data"), "--config", config, "--out", str(workspace / name)]
        assert main(argv) == 0
    for artifact in ("decoupler.ckpt", "losses.csv"):
        assert (workspace / "first" / artifact).read_bytes() == (workspace / "second" / artifact).read_bytes()


def test_sweep_reruns_are_byte_identical(workspace):
    config = write_config(workspace / "config.json",
                          **{"sweep-grid": [{"config_id": "s", "mechanism": "suppress"}]})
    for name in ("first", "second"):
        argv = ["sweep", "--data", str(workspace / "data"), "--config", config, "--out", str(workspace / name)]
        assert main(argv) == 0
    points = (workspace / "first" / "points.csv").read_bytes()
    assert len(points.splitlines()) == 2
    assert points == (workspace / "second" / "points.csv").read_bytes()
