from typing import List, Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

Activation = Literal["relu", "tanh", "sigmoid", "identity"]
OutputHead = Literal["linear", "logits", "gaussian-params"]


class NetworkSpec(BaseModel):
    """
    Dense network layout.

    ``layer_widths`` lists the input width followed by the output width of
    every layer, so a network with L layers has L + 1 widths and L
    activations.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    layer_widths: List[int] = Field(min_length=2)
    activations: List[Activation]
    output_head: OutputHead = "linear"

    @model_validator(mode="after")
    def check_layout(self):
        if any(width < 1 for width in self.layer_widths):
            raise ValueError("layer widths must be positive")
        if len(self.activations) != len(self.layer_widths) - 1:
            raise ValueError(
                f"{len(self.layer_widths) - 1} layers need as many activations, got {len(self.activations)}"
            )
        if self.output_head == "gaussian-params" and self.layer_widths[-1] % 2:
            raise ValueError("a gaussian-params head needs an even output width (mean and log-variance blocks)")
        return self

    @property
    def input_width(self) -> int:
        return self.layer_widths[0]

    @property
    def output_width(self) -> int:
        return self.layer_widths[-1]

    @property
    def num_layers(self) -> int:
        return len(self.activations)

    @classmethod
    def mlp(cls, input_width: int, hidden: List[int], output_width: int,
            activation: Activation = "relu", output_head: OutputHead = "linear") -> "NetworkSpec":
        widths = [input_width, *hidden, output_width]
        return cls(
            layer_widths=widths,
            activations=[activation] * len(hidden) + ["identity"],
            output_head=output_head,
        )
