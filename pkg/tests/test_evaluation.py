import csv
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from core.rng import RngStream
from dataio.split import holdout_split
from dataio.synthetic import generate_synthetic
from evaluation.classifier import train_classifier
from evaluation.metrics import auc, leakage, pareto_front, prior_accuracy, tradeoff_curve
from evaluation.plotting import plot_tradeoff
from evaluation.protocol import evaluate_sanitized, sensitive_cas_evaluate
from evaluation.records import (
    POINT_COLUMNS,
    read_points_csv,
    write_loss_csv,
    write_pareto_csv,
    write_points_csv,
)
from evaluation.sweep import ablation_grid, ablation_variants, tradeoff_sweep
from decoupler.training import EpochRecord
from mechanisms.pipeline import sanitize_dataset
from schemas.budget import PrivacyBudget
from schemas.evaluation import ClassifierSpec, TradeoffPoint
from schemas.pipeline import PipelineConfig, SweepEntry
from utils.errors import ConfigError, ParameterError, SchemaMismatchError, UnsupportedMechanismError

from tests.conftest import tiny_decoupler_config, tiny_eval_config, tiny_synth


def point(config_id, leak, util, prior=0.25, mechanism="dp-sample", epsilon=1.0):
    return TradeoffPoint(config_id=config_id, seed=0, mechanism=mechanism, epsilon=epsilon,
                         hyperparams={"alpha1": 1.0, "beta": 5.0},
                         leakage_acc=leak, prior_acc=prior, utility_acc=util)


def dominated(p, points):
    return any(q[0] <= p[0] and q[1] >= p[1] and (q[0] < p[0] or q[1] > p[1]) for q in points)


def test_leakage_and_prior():
    assert leakage(0.6, 0.25) == pytest.approx(0.35)
    assert leakage(0.2, 0.25) == pytest.approx(-0.05)
    with pytest.raises(ParameterError):
        leakage(1.2, 0.25)
    assert prior_accuracy([0, 0, 1], [0, 1, 1, 1]) == pytest.approx(0.25)


@pytest.mark.parametrize("seed", range(20))
def test_pareto_front_matches_domination_oracle(seed):
    coords = [tuple(row) for row in RngStream(seed).random((50, 2))]
    front = pareto_front(coords)
    expected = sorted(p for p in coords if not dominated(p, coords))
    assert front == expected


def test_pareto_front_ties_and_duplicates():
    coords = [(0.5, 0.6), (0.5, 0.8), (0.3, 0.8), (0.3, 0.8), (0.7, 0.9)]
    assert pareto_front(coords) == [(0.3, 0.8), (0.7, 0.9)]
    assert pareto_front([]) == []


def test_pareto_front_accepts_tradeoff_points():
    points = [point("a", 0.5, 0.7), point("b", 0.6, 0.6), point("c", 0.4, 0.65)]
    assert [p.config_id for p in pareto_front(points)] == ["c", "a"]


def test_auc_fixtures():
    assert auc([(0.25, 1.0)], 0.25, 1.0) == pytest.approx(1.0, abs=1e-12)
    assert auc([], 0.25, 0.5) == pytest.approx(0.5, abs=1e-12)
    expected = (0.25 * (0.5 + 0.7) / 2 + 0.25 * (0.7 + 0.9) / 2 + 0.25 * 0.9) / 0.75
    assert auc([(0.5, 0.7), (0.75, 0.9)], 0.25, 0.5) == pytest.approx(expected, abs=1e-12)
    # Leakage below chance is clipped onto the chance anchor.
    assert auc([(0.1, 0.8)], 0.25, 0.5) == pytest.approx(0.8, abs=1e-12)
    assert auc([(0.25, 0.5), (1.0, 1.0)], 0.25, 0.5) == pytest.approx(0.75, abs=1e-12)


def test_auc_grows_when_a_point_is_dominated_by_a_new_one():
    base = pareto_front([(0.4, 0.6), (0.7, 0.8)])
    better = pareto_front([(0.4, 0.6), (0.7, 0.8), (0.35, 0.65)])
    assert auc(better, 0.25, 0.5) >= auc(base, 0.25, 0.5)


def test_auc_rejects_chance_leakage_of_one():
    with pytest.raises(ParameterError):
        auc([], 1.0, 0.5)


def test_tradeoff_curve_bundles_front_and_area():
    points = [point("a", 0.5, 0.7), point("b", 0.6, 0.6)]
    curve = tradeoff_curve(points, 0.25, 0.5)
    assert [p.config_id for p in curve.pareto] == ["a"]
    assert 0.0 <= curve.auc <= 1.0


def test_classifier_learns_separable_blobs():
    rng = RngStream(0)
    X = np.concatenate([rng.standard_normal((100, 2)) * 0.5 - 2.0, rng.standard_normal((100, 2)) * 0.5 + 2.0])
    y = np.repeat([0, 1], 100)
    spec = ClassifierSpec(hidden=[8], epochs=20, batch_size=32, learning_rate=1e-2)
    model = train_classifier(X, y, 2, spec, RngStream(1))
    assert model.accuracy(X, y) > 0.95
    assert model.predict(np.zeros((0, 2))).shape == (0,)


def test_classifier_warm_start_needs_same_layout():
    X, y = np.zeros((4, 3)), np.array([0, 1, 0, 1])
    spec = ClassifierSpec(hidden=[4], epochs=1)
    model = train_classifier(X, y, 2, spec, RngStream(0))
    with pytest.raises(ValueError):
        train_classifier(X, y, 3, spec, RngStream(0), init=model)


def test_evaluate_reports_leakage_and_utility(tiny_data, decoupler, eval_config):
    sanitized = sanitize_dataset(tiny_data, decoupler, "suppress", None, RngStream(0))
    report = evaluate_sanitized(sanitized, tiny_data, eval_config, RngStream(1))
    assert report.mechanism == "suppress"
    assert report.sensitive_attribute == "sensitive"
    assert 0.0 <= report.leakage_acc <= 1.0
    assert report.leakage_delta == pytest.approx(report.leakage_acc - report.prior_acc)
    assert set(report.utility_accs) == {"utility"}
    assert report.utility_acc == report.utility_accs["utility"]
    assert report.cas_acc is None and report.e5_receiver_acc is None


def test_evaluate_with_cas_and_sensitive_distribution(tiny_data, decoupler, eval_config):
    sanitized = sanitize_dataset(tiny_data, decoupler, "dp-sample", PrivacyBudget(epsilon=1.0), RngStream(0))
    report = evaluate_sanitized(sanitized, tiny_data, eval_config, RngStream(1), tiny_data, cas=True, e5=True)
    for value in (report.cas_acc, report.e5_receiver_acc, report.e5_attacker_acc):
        assert 0.0 <= value <= 1.0


def test_cas_needs_clean_test(tiny_data, decoupler, eval_config):
    sanitized = sanitize_dataset(tiny_data, decoupler, "suppress", None, RngStream(0))
    with pytest.raises(SchemaMismatchError):
        evaluate_sanitized(sanitized, tiny_data, eval_config, RngStream(1), cas=True)


@pytest.mark.parametrize("name", ["suppress", "obfuscate", "pixel-noise", "interpolate"])
def test_sensitive_distribution_learning_needs_synthetic_labels(tiny_data, decoupler, name):
    sanitized = sanitize_dataset(tiny_data, decoupler, name, PrivacyBudget(epsilon=1.0), RngStream(0))
    with pytest.raises(UnsupportedMechanismError):
        sensitive_cas_evaluate(sanitized, tiny_data, ClassifierSpec(epochs=1), RngStream(1))


def test_suppressed_latents_leave_the_attacker_at_the_prior(decoupler):
    data = generate_synthetic(tiny_synth(n=400, sensitive_weights=[0.55, 0.15, 0.15, 0.15]), 3)
    sanitized = sanitize_dataset(data, decoupler, "suppress", None, RngStream(0))
    y = data.column("sensitive")
    train, test = holdout_split(data.n, 0.2, RngStream(1))
    spec = ClassifierSpec(hidden=[8], epochs=20, batch_size=32, learning_rate=1e-2)
    attacker = train_classifier(sanitized.z_sensitive[train], y[train], 4, spec, RngStream(2))
    accuracy = attacker.accuracy(sanitized.z_sensitive[test], y[test])
    assert abs(accuracy - prior_accuracy(y[train], y[test])) <= 0.02


def test_points_csv_roundtrip(tmp_path):
    points = [point("a", 0.5, 0.7), point("b", 0.3, 0.55, mechanism="suppress", epsilon=None)]
    path = tmp_path / "points.csv"
    write_points_csv(path, points)
    with open(path, newline="") as f:
        assert next(csv.reader(f)) == POINT_COLUMNS
    loaded = read_points_csv(path)
    assert [p.config_id for p in loaded] == ["a", "b"]
    assert loaded[1].epsilon is None
    assert loaded[0].leakage_acc == 0.5
    assert loaded[0].hyperparams == {"alpha1": 1.0, "beta": 5.0}


def test_empty_points_csv_is_header_only(tmp_path):
    path = tmp_path / "points.csv"
    write_points_csv(path, [])
    assert path.read_text() == ",".join(POINT_COLUMNS) + "\n"
    assert read_points_csv(path) == []


def test_points_csv_with_missing_columns(tmp_path):
    path = tmp_path / "points.csv"
    path.write_text("config_id,seed\nx,0\n")
    with pytest.raises(ConfigError):
        read_points_csv(path)


def test_pareto_and_loss_csv(tmp_path):
    write_pareto_csv(tmp_path / "pareto.csv", [point("a", 0.5, 0.7)])
    rows = list(csv.reader(open(tmp_path / "pareto.csv", newline="")))
    assert rows == [["config_id", "seed", "mechanism", "leakage_acc", "utility_acc"],
                    ["a", "0", "dp-sample", "0.5", "0.7"]]
    write_loss_csv(tmp_path / "losses.csv", [EpochRecord(1, 100.0, 1.3, 0.2, 1.4, 99.0)])
    rows = list(csv.reader(open(tmp_path / "losses.csv", newline="")))
    assert rows[0] == ["epoch", "L1", "L2", "L3", "L4", "joint"]
    assert rows[1] == ["1", "100.0", "1.3", "0.2", "1.4", "99.0"]


def svg_elements(path):
    root = ET.parse(path).getroot()
    return {el.get("id"): el for el in root.iter() if el.get("id")}


def test_plot_of_one_point_has_one_marker_and_two_dashed_anchors(tmp_path):
    points = [point("a", 0.5, 0.7)]
    path = tmp_path / "tradeoff.svg"
    plot_tradeoff(points, pareto_front(points), 0.25, 0.5, path)
    elements = svg_elements(path)
    markers = [el for el in elements["tradeoff-points"].iter() if el.tag.endswith("use")]
    assert len(markers) == 1
    for gid in ("anchor-0", "anchor-1"):
        styles = [el.get("style", "") for el in elements[gid].iter() if el.tag.endswith("path")]
        assert any("stroke-dasharray" in style for style in styles)
    assert "pareto-front" in elements


def test_plot_is_byte_stable(tmp_path):
    points = [point("a", 0.5, 0.7), point("b", 0.4, 0.6)]
    front = pareto_front(points)
    plot_tradeoff(points, front, 0.25, 0.5, tmp_path / "one.svg")
    plot_tradeoff(points, front, 0.25, 0.5, tmp_path / "two.svg")
    assert (tmp_path / "one.svg").read_bytes() == (tmp_path / "two.svg").read_bytes()


def test_ablation_grid_covers_every_variant():
    config = tiny_decoupler_config()
    variants = ablation_variants(config)
    assert variants["beta-vae"].alphas == (1.0, 0.0, 0.0, 0.0)
    assert variants["no-dcorr"].alpha3 == 0.0 and variants["no-dcorr"].alpha2 == config.alpha2
    grid = ablation_grid(config, [0.5, 2.0], [0])
    assert len(grid) == 10
    assert len({entry.config_id for entry in grid}) == 10
    assert all(entry.mechanism == "dp-sample" for entry in grid)


def test_empty_sweep(tiny_data):
    assert tradeoff_sweep([], PipelineConfig(), tiny_data) == ([], [])


def test_sweep_keeps_grid_order_and_reports_failures(tiny_data):
    base = PipelineConfig(decoupler=tiny_decoupler_config(), eval=tiny_eval_config())
    grid = [
        SweepEntry(config_id="dp", mechanism="dp-sample", budget={"epsilon": 1.0}),
        SweepEntry(config_id="bad-split", mechanism="suppress", decoupler={"k": 99}),
        SweepEntry(config_id="suppress", mechanism="suppress"),
    ]
    points, failures = tradeoff_sweep(grid, base, tiny_data, seed=0)
    assert [p.config_id for p in points] == ["dp", "suppress"]
    assert [f["config_id"] for f in failures] == ["bad-split"]
    assert points[0].epsilon == 1.0 and points[1].epsilon is None
    assert points[0].hyperparams["alpha3"] == base.decoupler.alpha3
