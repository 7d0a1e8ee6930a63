"""
Trade-off sweeps.

A sweep runs in two phases: every distinct (decoupler config, seed) pair is
trained once, then every grid entry is sanitized and evaluated. Both phases
fan out over joblib workers; results come back in grid order. A failing
entry is logged and reported without stopping the sweep.
"""

import json
import logging
from typing import Dict, List, Optional, Tuple

from joblib import Parallel, delayed

from core.rng import RngStream
from dataio.split import holdout_split, split_aux_sensitive
from decoupler.training import train_decoupler
from evaluation.protocol import evaluate_sanitized
from mechanisms.pipeline import sanitize_dataset
from models.dataset import LabeledDataset
from schemas.decoupler import DecouplerConfig
from schemas.evaluation import TradeoffPoint
from schemas.pipeline import PipelineConfig, SweepEntry, apply_overrides
from utils.errors import SanitizerError

logger = logging.getLogger(__name__)

BUDGETED = ("obfuscate", "dp-sample")


def ablation_variants(config: DecouplerConfig) -> Dict[str, DecouplerConfig]:
    """The full decoupler, each regulariser switched off in turn, and the β-VAE-only model."""
    return {
        "full": config,
        "no-aligner": config.model_copy(update={"alpha2": 0.0}),
        "no-dcorr": config.model_copy(update={"alpha3": 0.0}),
        "no-adversary": config.model_copy(update={"alpha4": 0.0}),
        "beta-vae": config.beta_vae(),
    }


def ablation_grid(config: DecouplerConfig, epsilons: List[float], seeds: List[int],
                  mechanism: str = "dp-sample", variants: Optional[List[str]] = None) -> List[SweepEntry]:
    """One entry per (variant, ε, seed); the ε values trace each variant's trade-off curve."""
    available = ablation_variants(config)
    names = variants or list(available)
    entries = []
    for name in names:
        overrides = {f"alpha{i}": getattr(available[name], f"alpha{i}") for i in range(1, 5)}
        for seed in seeds:
            for epsilon in epsilons:
                entries.append(SweepEntry(
                    config_id=f"{name}/eps={epsilon:g}/seed={seed}",
                    seed=seed,
                    mechanism=mechanism,
                    decoupler=overrides,
                    budget={"epsilon": epsilon},
                ))
    return entries


def _decoupler_key(config: DecouplerConfig, seed: int) -> str:
    return json.dumps({"config": config.model_dump(mode="json"), "seed": seed}, sort_keys=True)


def _train_job(config: DecouplerConfig, aux: LabeledDataset, seed: int):
    try:
        params, _ = train_decoupler(config, aux, RngStream(seed).child("decoupler"))
        return params, None
    except (SanitizerError, ValueError) as exc:
        return None, str(exc)


def _point_job(entry: SweepEntry, base: PipelineConfig, decoupler, aux: LabeledDataset,
               target: LabeledDataset, clean_test: LabeledDataset) -> Tuple[Optional[TradeoffPoint], Optional[str]]:
    logger.info("sweep point %s: start", entry.config_id)
    try:
        mechanism = entry.mechanism or base.mechanism.name
        budget = apply_overrides(base.budget, entry.budget, f"{entry.config_id}.budget")
        sigma = base.mechanism.pixel_sigma if entry.pixel_sigma is None else entry.pixel_sigma
        rng = RngStream(entry.seed).child(f"point/{entry.config_id}")
        sanitized = sanitize_dataset(target, decoupler, mechanism, budget if mechanism in BUDGETED else None,
                                     rng.child("sanitize"), sigma)
        report = evaluate_sanitized(sanitized, aux, base.eval, rng.child("evaluate"), clean_test)
        config = decoupler.config
        point = TradeoffPoint(
            config_id=entry.config_id,
            seed=entry.seed,
            mechanism=mechanism,
            epsilon=budget.epsilon if mechanism in BUDGETED else None,
            hyperparams={"alpha1": config.alpha1, "alpha2": config.alpha2, "alpha3": config.alpha3,
                         "alpha4": config.alpha4, "beta": config.beta},
            leakage_acc=report.leakage_acc,
            prior_acc=report.prior_acc,
            utility_acc=report.utility_acc if report.utility_acc is not None else 0.0,
        )
    except (SanitizerError, ValueError) as exc:
        logger.error("sweep point %s failed: %s", entry.config_id, exc)
        return None, str(exc)
    logger.info("sweep point %s: leakage_acc=%.4f utility_acc=%.4f", entry.config_id,
                point.leakage_acc, point.utility_acc)
    return point, None


def tradeoff_sweep(grid: List[SweepEntry], base: PipelineConfig, data: LabeledDataset, seed: int = 0,
                   jobs: int = 1):
    """
    Evaluate every grid entry. Returns (points, failures) where points keep
    grid order and failures is a list of {config_id, error} records.
    """
    if not grid:
        return [], []
    aux, target = split_aux_sensitive(data, base.data.aux_fraction, seed)
    keep_rows, test_rows = holdout_split(target.n, base.eval.test_fraction, RngStream(seed).child("clean-test"))
    target, clean_test = target.subset(keep_rows), target.subset(test_rows)

    configs, failures = [], []
    for entry in grid:
        try:
            configs.append(apply_overrides(base.decoupler, entry.decoupler, f"{entry.config_id}.decoupler"))
        except SanitizerError as exc:
            configs.append(None)
            failures.append({"config_id": entry.config_id, "error": exc.detail})

    keys, unique = [], {}
    for entry, config in zip(grid, configs):
        key = None if config is None else _decoupler_key(config, entry.seed)
        keys.append(key)
        if key is not None and key not in unique:
            unique[key] = (config, entry.seed)
    logger.info("sweep: %d entries, %d decoupler trainings, %d jobs", len(grid), len(unique), jobs)
    trained = Parallel(n_jobs=jobs)(delayed(_train_job)(config, aux, s) for config, s in unique.values())
    decouplers = dict(zip(unique, trained))

    runnable = []
    for entry, key in zip(grid, keys):
        if key is None:
            continue
        params, error = decouplers[key]
        if params is None:
            logger.error("sweep point %s failed: decoupler training: %s", entry.config_id, error)
            failures.append({"config_id": entry.config_id, "error": f"decoupler training: {error}"})
            continue
        runnable.append((entry, params))
    results = Parallel(n_jobs=jobs)(
        delayed(_point_job)(entry, base, params, aux, target, clean_test) for entry, params in runnable
    )
    points = []
    for (entry, _), (point, error) in zip(runnable, results):
        if point is None:
            failures.append({"config_id": entry.config_id, "error": error})
        else:
            points.append(point)
    order = {entry.config_id: i for i, entry in enumerate(grid)}
    failures.sort(key=lambda f: order.get(f["config_id"], len(order)))
    return points, failures
