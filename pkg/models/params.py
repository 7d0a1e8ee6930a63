from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np

from nets.autodiff import Tensor
from schemas.decoupler import DecouplerConfig, DecouplerSpecs
from schemas.nets import NetworkSpec
from utils.errors import ShapeError


@dataclass(frozen=True, eq=False)
class ParamTensors:
    weights: Tuple[Tensor, ...]
    biases: Tuple[Tensor, ...]


@dataclass(frozen=True, eq=False)
class ParamSet:
    """Per-layer weight matrices (fan_in × fan_out) and bias vectors of one network."""

    weights: Tuple[np.ndarray, ...]
    biases: Tuple[np.ndarray, ...]

    def __post_init__(self):
        if len(self.weights) != len(self.biases):
            raise ShapeError("every layer needs one weight matrix and one bias vector")
        for w, b in zip(self.weights, self.biases):
            if w.ndim != 2 or b.shape != (w.shape[1],):
                raise ShapeError(f"inconsistent layer shapes {w.shape} / {b.shape}")

    @property
    def total_count(self) -> int:
        return int(sum(w.size + b.size for w, b in zip(self.weights, self.biases)))

    def arrays(self) -> List[np.ndarray]:
        """Parameters in layer order: W0, b0, W1, b1, ..."""
        out = []
        for w, b in zip(self.weights, self.biases):
            out.extend((w, b))
        return out

    @classmethod
    def from_arrays(cls, arrays) -> "ParamSet":
        arrays = [np.asarray(a, dtype=np.float64) for a in arrays]
        return cls(tuple(arrays[0::2]), tuple(arrays[1::2]))

    def with_arrays(self, arrays) -> "ParamSet":
        arrays = list(arrays)
        if [a.shape for a in arrays] != [a.shape for a in self.arrays()]:
            raise ShapeError("replacement arrays do not match the parameter shapes")
        return ParamSet.from_arrays(arrays)

    def zeros_like(self) -> "ParamSet":
        return ParamSet.from_arrays([np.zeros_like(a) for a in self.arrays()])

    def as_tensors(self, requires_grad: bool = False) -> ParamTensors:
        return ParamTensors(
            tuple(Tensor(w, requires_grad) for w in self.weights),
            tuple(Tensor(b, requires_grad) for b in self.biases),
        )

    def gradient_from(self, tensors: ParamTensors) -> "ParamSet":
        leaves = [*tensors.weights, *tensors.biases]
        grads = [np.zeros_like(t.data) if t.grad is None else np.array(t.grad, dtype=np.float64) for t in leaves]
        n = len(tensors.weights)
        return ParamSet(tuple(grads[:n]), tuple(grads[n:]))

    def is_finite(self) -> bool:
        return all(np.all(np.isfinite(a)) for a in self.arrays())

    def matches(self, spec: NetworkSpec) -> bool:
        widths = spec.layer_widths
        return len(self.weights) == spec.num_layers and all(
            w.shape == (widths[i], widths[i + 1]) for i, w in enumerate(self.weights)
        )


@dataclass(frozen=True, eq=False)
class DecouplerParams:
    """
    Trained state of the global decoupler: encoder φ, decoder θ, one aligner u
    and one adversary v per sensitive attribute.
    """

    config: DecouplerConfig
    input_dim: int
    sensitive_attributes: Tuple[str, ...]
    class_counts: Tuple[int, ...]
    encoder: ParamSet
    decoder: ParamSet
    aligners: Tuple[ParamSet, ...]
    adversaries: Tuple[ParamSet, ...]
    specs: DecouplerSpecs = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        specs = self.config.network_specs(self.input_dim, list(self.class_counts))
        object.__setattr__(self, "specs", specs)
        if len(self.sensitive_attributes) != len(self.class_counts):
            raise ShapeError("one class count is needed per sensitive attribute")
        if len(self.aligners) != len(self.class_counts) or len(self.adversaries) != len(self.class_counts):
            raise ShapeError("one aligner and one adversary are needed per sensitive attribute")
        checks = [(self.encoder, specs.encoder), (self.decoder, specs.decoder)]
        checks += list(zip(self.aligners, specs.aligners)) + list(zip(self.adversaries, specs.adversaries))
        for params, spec in checks:
            if not params.matches(spec):
                raise ShapeError(f"parameters do not match network layout {spec.layer_widths}")

    @property
    def k(self) -> int:
        return self.config.k

    @property
    def m(self) -> int:
        return self.config.m

    def replace(self, **changes) -> "DecouplerParams":
        values = {
            name: getattr(self, name)
            for name in ("config", "input_dim", "sensitive_attributes", "class_counts",
                         "encoder", "decoder", "aligners", "adversaries")
        }
        values.update(changes)
        return DecouplerParams(**values)
