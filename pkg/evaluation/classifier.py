"""MLP classifiers for attackers, utility models, CAS and the E5 receiver."""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from sklearn.metrics import accuracy_score

from core.rng import RngStream
from decoupler.training import minibatches
from models.dataset import LabeledDataset
from models.params import ParamSet
from nets.autodiff import softmax_cross_entropy, value_and_grad
from nets.network import apply, forward, init_params
from nets.optim import AdamState, adam_step
from schemas.evaluation import ClassifierSpec
from schemas.nets import NetworkSpec
from utils.errors import NumericError, ShapeError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Classifier:
    network: NetworkSpec
    params: ParamSet

    @property
    def n_classes(self) -> int:
        return self.network.output_width

    def logits(self, X) -> np.ndarray:
        return forward(self.network, self.params, np.asarray(X, dtype=np.float64))

    def predict(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.shape[0] == 0:
            return np.zeros(0, dtype=np.int64)
        return np.argmax(self.logits(X), axis=1)

    def accuracy(self, X, y) -> float:
        y = np.asarray(y, dtype=np.int64)
        if y.size == 0:
            return 0.0
        return float(accuracy_score(y, self.predict(X)))


def network_for(input_dim: int, n_classes: int, spec: ClassifierSpec) -> NetworkSpec:
    return NetworkSpec.mlp(input_dim, spec.hidden, n_classes, spec.activation, "logits")


def train_classifier(X, y, n_classes: int, spec: ClassifierSpec, rng: RngStream,
                     init: Optional[Classifier] = None, epochs: Optional[int] = None) -> Classifier:
    """
    Minibatch Adam on softmax cross-entropy. ``init`` warm-starts from an
    existing classifier with the same layout.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if X.ndim != 2 or y.shape != (X.shape[0],):
        raise ShapeError(f"samples {X.shape} do not match labels {y.shape}")
    network = network_for(X.shape[1], n_classes, spec)
    if init is not None:
        if init.network != network:
            raise ShapeError("warm-start classifier has a different layout")
        params = init.params
    else:
        params = init_params(network, rng.child("init"))
    state = AdamState.fresh(params, spec.learning_rate)
    epochs = spec.epochs if epochs is None else epochs
    if X.shape[0] == 0:
        return Classifier(network, params)

    def loss_fn(tensors, xb, yb):
        return softmax_cross_entropy(apply(network, tensors, xb), yb).mean()

    for epoch in range(epochs):
        order = rng.child(f"shuffle/{epoch}").permutation(X.shape[0])
        for rows in minibatches(order, spec.batch_size):
            value, (grads,) = value_and_grad(lambda t: loss_fn(t, X[rows], y[rows]), params)
            if not np.isfinite(value):
                raise NumericError(f"classifier loss became non-finite at epoch {epoch}")
            params, state = adam_step(params, grads, state)
        logger.debug("classifier epoch %d/%d: last batch loss %.4f", epoch + 1, epochs, value)
    return Classifier(network, params)


def train_on_dataset(data: LabeledDataset, attribute: str, spec: ClassifierSpec, rng: RngStream,
                     init: Optional[Classifier] = None, epochs: Optional[int] = None) -> Classifier:
    return train_classifier(data.X, data.column(attribute), data.attribute(attribute).cardinality,
                            spec, rng, init, epochs)
