import numpy as np
import pytest

from core.rng import RngStream
from dataio.split import holdout_split, split_aux_sensitive
from dataio.synthetic import generate_synthetic
from decoupler.model import aligner_accuracy
from decoupler.training import train_decoupler
from evaluation.metrics import tradeoff_curve
from evaluation.protocol import cas_evaluate, sensitive_cas_evaluate
from evaluation.sweep import ablation_grid, tradeoff_sweep
from mechanisms.pipeline import sanitize_dataset
from schemas.budget import PrivacyBudget
from schemas.data import DataConfig
from schemas.decoupler import DecouplerConfig
from schemas.evaluation import ClassifierSpec
from schemas.pipeline import PipelineConfig

pytestmark = pytest.mark.slow

EPSILONS = [0.1, 0.3, 1.0, 3.0, 10.0]


@pytest.fixture(scope="module")
def reference():
    config = DataConfig()
    data = generate_synthetic(config.synth(), 0)
    aux, private = split_aux_sensitive(data, config.aux_fraction, 0)
    fit_rows, check_rows = holdout_split(aux.n, 0.2, RngStream(0).child("aux-check"))
    keep_rows, test_rows = holdout_split(private.n, 0.2, RngStream(0).child("clean-test"))
    params, log = train_decoupler(DecouplerConfig(), aux.subset(fit_rows), RngStream(0).child("decoupler"))
    return {
        "data": data,
        "aux_check": aux.subset(check_rows),
        "target": private.subset(keep_rows),
        "clean": private.subset(test_rows),
        "params": params,
        "log": log,
    }


def test_reference_decoupler_separates_the_sensitive_code(reference):
    assert reference["log"].steps[-1].L3 < 0.2
    assert aligner_accuracy(reference["params"], reference["aux_check"])["sensitive"] > 0.8


def test_dp_sampling_wins_sensitive_distribution_learning(reference):
    target, clean, params = reference["target"], reference["clean"], reference["params"]
    spec = ClassifierSpec()
    budget = PrivacyBudget(epsilon=1.0)
    rng = RngStream(0).child("ordering")

    sampled = sanitize_dataset(target, params, "dp-sample", budget, rng.child("dp-sample"))
    receiver, attacker = sensitive_cas_evaluate(sampled, clean, spec, rng.child("e5"))
    others = {
        name: cas_evaluate(sanitize_dataset(target, params, name, budget, rng.child(name)).data, clean,
                           "sensitive", spec, rng.child(f"cas/{name}"))
        for name in ("suppress", "obfuscate")
    }
    for name, accuracy in others.items():
        assert receiver >= accuracy + 0.10, name

    labels = target.column("sensitive")
    prior = np.bincount(labels).max() / labels.size
    assert abs(attacker - prior) <= 0.05


def test_full_decoupler_beats_the_beta_vae_curve(reference):
    data = reference["data"]
    base = PipelineConfig()
    for seed in range(3):
        grid = ablation_grid(base.decoupler, EPSILONS, [seed], variants=["full", "beta-vae"])
        points, failures = tradeoff_sweep(grid, base, data, seed=seed)
        assert failures == []
        areas = {}
        for variant in ("full", "beta-vae"):
            curve = [p for p in points if p.config_id.startswith(f"{variant}/")]
            assert len(curve) == len(EPSILONS)
            chance = min(p.prior_acc for p in curve)
            areas[variant] = tradeoff_curve(curve, chance, 0.5).auc
        assert areas["full"] > areas["beta-vae"], f"seed {seed}: {areas}"
