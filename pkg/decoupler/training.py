"""
Alternating optimisation of the decoupler.

Every step first gives each adversary ``adversary_steps`` Adam updates on
L4 with the encoder frozen, then takes one Adam step for encoder, decoder
and aligners on the joint loss with the adversaries frozen. Adversaries are
warm-started across steps and epochs.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np

from core.rng import RngStream
from decoupler.losses import TERMS, Batch, adversary_loss_fn, main_loss_fn
from decoupler.model import class_counts_for, init_decoupler, sensitive_label_matrix
from models.dataset import LabeledDataset
from models.params import DecouplerParams
from nets.autodiff import value_and_grad
from nets.network import forward, split_gaussian
from nets.optim import AdamState, adam_step
from nets.vae import reparameterize
from schemas.decoupler import DecouplerConfig
from utils.errors import ConfigError, NumericError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class StepRecord:
    epoch: int
    step: int
    L1: float
    L2: float
    L3: float
    L4: float
    joint: float
    adversary: float


@dataclass(frozen=True)
class EpochRecord:
    epoch: int
    L1: float
    L2: float
    L3: float
    L4: float
    joint: float


@dataclass
class TrainingLog:
    steps: List[StepRecord] = field(default_factory=list)
    epochs: List[EpochRecord] = field(default_factory=list)


def minibatches(order: np.ndarray, batch_size: int) -> List[np.ndarray]:
    """Consecutive slices of ``order``; a trailing slice shorter than 2 joins the one before it."""
    batches = [order[i:i + batch_size] for i in range(0, len(order), batch_size)]
    if len(batches) > 1 and len(batches[-1]) < 2:
        tail = batches.pop()
        batches[-1] = np.concatenate([batches[-1], tail])
    return batches


def _optimizer(params, config: DecouplerConfig) -> AdamState:
    return AdamState.fresh(params, config.learning_rate, config.adam_beta1, config.adam_beta2)


def _epoch_record(epoch: int, steps: List[StepRecord], config: DecouplerConfig) -> EpochRecord:
    means = {name: float(np.mean([getattr(s, name) for s in steps])) for name in TERMS}
    a1, a2, a3, a4 = config.alphas
    joint = a1 * means["L1"]
    if a2:
        joint += a2 * means["L2"]
    if a3:
        joint += a3 * means["L3"]
    if a4:
        joint -= a4 * means["L4"]
    return EpochRecord(epoch, means["L1"], means["L2"], means["L3"], means["L4"], joint)


def train_decoupler(config: DecouplerConfig, aux: LabeledDataset, rng: RngStream,
                    on_epoch_end: Optional[Callable[[EpochRecord, DecouplerParams], None]] = None,
                    init: Optional[DecouplerParams] = None):
    """
    Train the decoupler on the auxiliary dataset.

    Returns the final parameters and a TrainingLog. A non-finite loss,
    gradient or parameter raises NumericError carrying the parameters from
    before the failing step.
    """
    names = aux.sensitive_names(config.sensitive_attributes)
    if aux.n < 2:
        raise ConfigError(f"training needs at least 2 samples, got {aux.n}")
    X = aux.X.astype(np.float64)
    Y = sensitive_label_matrix(aux, names)
    params = init or init_decoupler(config, aux.input_dim, names, class_counts_for(aux, names), rng.child("init"))

    enc_state = _optimizer(params.encoder, config)
    dec_state = _optimizer(params.decoder, config)
    aligner_states = [_optimizer(a, config) for a in params.aligners]
    adversary_states = [_optimizer(v, config) for v in params.adversaries]
    log = TrainingLog()
    logger.info("training decoupler on %d samples, sensitive=%s, k=%d, m=%d, epochs=%d",
                aux.n, names, config.k, config.m, config.epochs)

    for epoch in range(1, config.epochs + 1):
        order = rng.child(f"shuffle/{epoch}").permutation(aux.n)
        epoch_steps = []
        for step, rows in enumerate(minibatches(order, config.batch_size)):
            noise = rng.child(f"noise/{epoch}/{step}").standard_normal((len(rows), config.m))
            batch = Batch(X[rows], Y[rows], noise)
            last_good = params

            mu, logvar = split_gaussian(forward(params.specs.encoder, params.encoder, batch.X))
            z = reparameterize(mu, logvar, noise)
            adversary_value = float("nan")
            for _ in range(config.adversary_steps):
                adversary_value, grads = value_and_grad(adversary_loss_fn(params, z, batch.sensitive),
                                                        *params.adversaries)
                if not np.isfinite(adversary_value):
                    raise NumericError(f"adversary loss became non-finite at epoch {epoch} step {step}", last_good)
                updated = [adam_step(v, g, s) for v, g, s in zip(params.adversaries, grads, adversary_states)]
                adversary_states = [s for _, s in updated]
                params = params.replace(adversaries=tuple(v for v, _ in updated))

            terms = {}
            joint, grads = value_and_grad(main_loss_fn(params, batch, terms),
                                          params.encoder, params.decoder, *params.aligners)
            if not np.isfinite(joint) or not all(g.is_finite() for g in grads):
                raise NumericError(f"joint loss became non-finite at epoch {epoch} step {step}", last_good)
            encoder, enc_state = adam_step(params.encoder, grads[0], enc_state)
            decoder, dec_state = adam_step(params.decoder, grads[1], dec_state)
            updated = [adam_step(a, g, s) for a, g, s in zip(params.aligners, grads[2:], aligner_states)]
            aligner_states = [s for _, s in updated]
            params = params.replace(encoder=encoder, decoder=decoder, aligners=tuple(a for a, _ in updated))
            if not all(p.is_finite() for p in (params.encoder, params.decoder, *params.aligners, *params.adversaries)):
                raise NumericError(f"parameters became non-finite at epoch {epoch} step {step}", last_good)

            record = StepRecord(epoch, step, terms["L1"], terms.get("L2", 0.0), terms.get("L3", 0.0),
                                terms.get("L4", 0.0), joint, adversary_value)
            epoch_steps.append(record)
            logger.debug("epoch %d step %d: L1=%.4f L2=%.4f L3=%.4f L4=%.4f joint=%.4f",
                         epoch, step, record.L1, record.L2, record.L3, record.L4, record.joint)

        summary = _epoch_record(epoch, epoch_steps, config)
        log.steps.extend(epoch_steps)
        log.epochs.append(summary)
        logger.info("epoch %d/%d: L1=%.4f L2=%.4f L3=%.4f L4=%.4f joint=%.4f", epoch, config.epochs,
                    summary.L1, summary.L2, summary.L3, summary.L4, summary.joint)
        if on_epoch_end is not None:
            on_epoch_end(summary, params)
    return params, log
