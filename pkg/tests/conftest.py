import pytest

from core.rng import RngStream
from dataio.synthetic import generate_synthetic
from decoupler.model import init_decoupler
from schemas.data import SynthConfig
from schemas.decoupler import DecouplerConfig
from schemas.evaluation import ClassifierSpec, EvalConfig


def tiny_synth(**overrides) -> SynthConfig:
    values = {"n": 160, "image_size": (8, 8, 3), "shard_size": 64}
    values.update(overrides)
    return SynthConfig(**values)


def tiny_decoupler_config(**overrides) -> DecouplerConfig:
    values = {
        "k": 2,
        "m": 6,
        "epochs": 2,
        "batch_size": 64,
        "encoder_hidden": [16],
        "decoder_hidden": [16],
        "aligner_hidden": [8],
        "adversary_hidden": [8],
    }
    values.update(overrides)
    return DecouplerConfig(**values)


def tiny_eval_config(**overrides) -> EvalConfig:
    spec = ClassifierSpec(hidden=[8], epochs=1, batch_size=32)
    values = {"attacker": spec, "utility": spec, "pretrain_epochs": 1, "finetune_epochs": 1}
    values.update(overrides)
    return EvalConfig(**values)


@pytest.fixture
def rng():
    return RngStream(1234)


@pytest.fixture(scope="session")
def tiny_data():
    return generate_synthetic(tiny_synth(), seed=7)


@pytest.fixture
def decoupler_config():
    return tiny_decoupler_config()


@pytest.fixture
def decoupler(tiny_data, decoupler_config):
    return init_decoupler(decoupler_config, tiny_data.input_dim, ["sensitive"], [4], RngStream(5))


@pytest.fixture
def eval_config():
    return tiny_eval_config()
