"""
Evaluation of a sanitized dataset.

Sanitized rows are split into a train part and a held-out part. The
attacker is pretrained on clean auxiliary data, finetuned on the train part
and scored on the held-out part; the prior accuracy is the train part's
majority class scored on the held-out part; each utility model trains on
the train part and is scored on the held-out part. CAS and the E5 receiver
train on the sanitized rows and are scored on clean test data.
"""

import logging
from typing import Dict, Optional, Tuple

from core.rng import RngStream
from dataio.split import holdout_split
from evaluation.classifier import train_on_dataset
from evaluation.metrics import leakage, prior_accuracy
from models.dataset import LabeledDataset
from models.sanitized import SanitizedDataset
from schemas.evaluation import ClassifierSpec, EvalConfig, EvaluationReport
from utils.errors import SchemaMismatchError, UnsupportedMechanismError

logger = logging.getLogger(__name__)


def _require_same_schema(a: LabeledDataset, b: LabeledDataset, what: str) -> None:
    if not a.same_schema(b):
        raise SchemaMismatchError(
            f"{what}: attribute schemas or sample shapes differ "
            f"({a.attribute_names} {a.sample_shape} vs {b.attribute_names} {b.sample_shape})"
        )


def attacker_accuracy(sanitized: LabeledDataset, aux: LabeledDataset, attribute: str, config: EvalConfig,
                      rng: RngStream, split=None) -> Tuple[float, float]:
    """(attacker accuracy, prior accuracy) of the adaptive attacker on held-out sanitized rows."""
    _require_same_schema(sanitized, aux, "attacker pretraining data")
    train_rows, test_rows = split or holdout_split(sanitized.n, config.test_fraction, rng.child("holdout"))
    train, test = sanitized.subset(train_rows), sanitized.subset(test_rows)
    pretrained = train_on_dataset(aux, attribute, config.attacker, rng.child("attacker/pretrain"),
                                  epochs=config.pretrain_epochs)
    attacker = train_on_dataset(train, attribute, config.attacker, rng.child("attacker/finetune"),
                                init=pretrained, epochs=config.finetune_epochs)
    return attacker.accuracy(test.X, test.column(attribute)), prior_accuracy(train.column(attribute),
                                                                              test.column(attribute))


def utility_accuracies(sanitized: LabeledDataset, attributes, config: EvalConfig, rng: RngStream,
                       split=None) -> Dict[str, float]:
    train_rows, test_rows = split or holdout_split(sanitized.n, config.test_fraction, rng.child("holdout"))
    train, test = sanitized.subset(train_rows), sanitized.subset(test_rows)
    return {
        name: train_on_dataset(train, name, config.utility, rng.child(f"utility/{name}")).accuracy(
            test.X, test.column(name))
        for name in attributes
    }


def cas_evaluate(sanitized_train: LabeledDataset, clean_test: LabeledDataset, attribute: str,
                 spec: ClassifierSpec, rng: RngStream) -> float:
    """Train on sanitized samples with their original labels, score on clean samples."""
    _require_same_schema(sanitized_train, clean_test, "CAS")
    model = train_on_dataset(sanitized_train, attribute, spec, rng)
    return model.accuracy(clean_test.X, clean_test.column(attribute))


def sensitive_cas_evaluate(sanitized: SanitizedDataset, clean_test: LabeledDataset, spec: ClassifierSpec,
                           rng: RngStream, test_fraction: float = 0.2) -> Tuple[float, float]:
    """
    (receiver accuracy, attacker accuracy) for learning p(X, Y_S).

    The receiver trains on (X̃, Ỹ_S) and is scored on clean (X, Y_S). The
    attacker trains on (X̃, Y_S) and is scored on held-out (X̃, Y_S).
    """
    if sanitized.synthetic_sensitive is None:
        raise UnsupportedMechanismError(
            f"mechanism {sanitized.mechanism!r} emits no synthetic sensitive labels; "
            "sensitive-distribution learning needs dp-sample"
        )
    _require_same_schema(sanitized.data, clean_test, "sensitive CAS")
    attribute = sanitized.sensitive_attribute
    receiver = train_on_dataset(sanitized.with_synthetic_labels(), attribute, spec, rng.child("receiver"))
    receiver_acc = receiver.accuracy(clean_test.X, clean_test.column(attribute))
    train_rows, test_rows = holdout_split(sanitized.n, test_fraction, rng.child("holdout"))
    train, test = sanitized.data.subset(train_rows), sanitized.data.subset(test_rows)
    attacker = train_on_dataset(train, attribute, spec, rng.child("attacker"))
    return receiver_acc, attacker.accuracy(test.X, test.column(attribute))


def evaluate_sanitized(sanitized: SanitizedDataset, aux: LabeledDataset, config: EvalConfig, rng: RngStream,
                       clean_test: Optional[LabeledDataset] = None, cas: bool = False,
                       e5: bool = False) -> EvaluationReport:
    attribute = config.sensitive_attribute or sanitized.sensitive_attribute
    data = sanitized.data
    utility_names = config.utility_attributes or data.non_sensitive_names([attribute])
    split = holdout_split(data.n, config.test_fraction, rng.child("holdout"))

    attacker_acc, prior_acc = attacker_accuracy(data, aux, attribute, config, rng, split)
    utilities = utility_accuracies(data, utility_names, config, rng, split)
    report = EvaluationReport(
        mechanism=sanitized.mechanism,
        sensitive_attribute=attribute,
        leakage_acc=attacker_acc,
        prior_acc=prior_acc,
        leakage_delta=leakage(attacker_acc, prior_acc),
        utility_acc=utilities[utility_names[0]] if utility_names else None,
        utility_accs=utilities,
    )
    if (cas or e5) and clean_test is None:
        raise SchemaMismatchError("CAS and sensitive-distribution evaluation need a clean test dataset")
    if cas and utility_names:
        report.cas_acc = cas_evaluate(data, clean_test, utility_names[0], config.utility, rng.child("cas"))
    if e5:
        report.e5_receiver_acc, report.e5_attacker_acc = sensitive_cas_evaluate(
            sanitized, clean_test, config.utility, rng.child("e5"), config.test_fraction)
    logger.info("evaluated %s: leakage_acc=%.4f prior=%.4f utility=%s",
                sanitized.mechanism, attacker_acc, prior_acc, utilities)
    return report
