"""
Seeded random streams.

Every stream is a Philox counter-based generator keyed by (seed, stream id),
so workers that own different stream ids draw independent sequences without
sharing any state.
"""

from dataclasses import dataclass, field

import numpy as np

from utils.errors import ParameterError
from utils.hash import stream_key

_U64 = 1 << 64


@dataclass(eq=False)
class RngStream:
    seed: int
    stream_id: int = 0
    _generator: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self):
        for name in ("seed", "stream_id"):
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)) or not 0 <= int(value) < _U64:
                raise ParameterError(f"{name} must be an unsigned 64-bit integer, got {value!r}")
        sequence = np.random.SeedSequence(entropy=int(self.seed), spawn_key=(int(self.stream_id),))
        self._generator = np.random.Generator(np.random.Philox(sequence))

    @property
    def generator(self) -> np.random.Generator:
        return self._generator

    def child(self, name) -> "RngStream":
        """Derive an independent stream; the same name always yields the same stream."""
        return RngStream(self.seed, stream_key(self.stream_id, name))

    def standard_normal(self, size) -> np.ndarray:
        return self._generator.standard_normal(size)

    def random(self, size) -> np.ndarray:
        return self._generator.random(size)

    def uniform(self, low, high, size) -> np.ndarray:
        return self._generator.uniform(low, high, size)

    def integers(self, low, high=None, size=None):
        return self._generator.integers(low, high, size=size)

    def permutation(self, n: int) -> np.ndarray:
        return self._generator.permutation(n)

    def choice(self, a, size=None, p=None):
        return self._generator.choice(a, size=size, p=p)
