import numpy as np

from core.rng import RngStream
from models.params import ParamSet, ParamTensors
from nets.autodiff import Tensor, as_tensor
from schemas.nets import NetworkSpec
from utils.errors import ShapeError

ACTIVATIONS = {
    "relu": Tensor.relu,
    "tanh": Tensor.tanh,
    "sigmoid": Tensor.sigmoid,
    "identity": lambda t: t,
}


def init_params(spec: NetworkSpec, rng: RngStream) -> ParamSet:
    """Glorot-uniform weights, zero biases."""
    weights, biases = [], []
    for fan_in, fan_out in zip(spec.layer_widths[:-1], spec.layer_widths[1:]):
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-limit, limit, (fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return ParamSet(tuple(weights), tuple(biases))


def apply(spec: NetworkSpec, params: ParamTensors, batch) -> Tensor:
    """Row-wise network outputs as a differentiable Tensor."""
    x = as_tensor(batch)
    if x.ndim != 2 or x.shape[1] != spec.input_width:
        raise ShapeError(f"batch of shape {x.shape} does not match input width {spec.input_width}")
    if len(params.weights) != spec.num_layers:
        raise ShapeError(f"{spec.num_layers} layers expected, got {len(params.weights)} parameter blocks")
    for w, b, activation in zip(params.weights, params.biases, spec.activations):
        x = ACTIVATIONS[activation](x @ w + b)
    return x


def forward(spec: NetworkSpec, params: ParamSet, batch) -> np.ndarray:
    batch = np.asarray(batch, dtype=np.float64)
    if not params.matches(spec):
        raise ShapeError(f"parameters do not match network layout {spec.layer_widths}")
    return apply(spec, params.as_tensors(), batch).data


def split_gaussian(out):
    """Split a gaussian-params head into its (mean, log-variance) blocks."""
    half = out.shape[1] // 2
    return out[:, :half], out[:, half:]
