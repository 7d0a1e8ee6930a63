import json

import pytest
from pydantic import ValidationError

from schemas.budget import PrivacyBudget
from schemas.decoupler import DecouplerConfig
from schemas.evaluation import EvaluationReport
from schemas.pipeline import PipelineConfig, SweepEntry, apply_overrides, load_pipeline_config, parse_pipeline_config
from utils.errors import ConfigError


def test_empty_document_means_defaults():
    config = parse_pipeline_config("")
    assert config == PipelineConfig()
    assert config.decoupler.k == 8 and config.decoupler.m == 32
    assert config.decoupler.alphas == (1.0, 1.0, 100.0, 1.0)
    assert config.budget.epsilon == 1.0


def test_missing_config_path_means_defaults(tmp_path):
    assert load_pipeline_config(None) == PipelineConfig()
    with pytest.raises(ConfigError):
        load_pipeline_config(str(tmp_path / "absent.json"))


def test_malformed_json_reports_position():
    with pytest.raises(ConfigError, match="line 2 column"):
        parse_pipeline_config('{"data": {}\n,,}')


def test_top_level_must_be_an_object():
    with pytest.raises(ConfigError, match="object"):
        parse_pipeline_config("[1, 2]")


def test_unknown_and_invalid_keys_name_their_location():
    with pytest.raises(ConfigError, match="decoupler.gamma"):
        parse_pipeline_config(json.dumps({"decoupler": {"gamma": 1}}))
    with pytest.raises(ConfigError, match="decoupler"):
        parse_pipeline_config(json.dumps({"decoupler": {"k": 32, "m": 32}}))


def test_sweep_grid_is_read_under_its_hyphenated_key():
    text = json.dumps({"sweep-grid": [{"config_id": "a", "mechanism": "suppress"}]})
    config = parse_pipeline_config(text)
    assert config.sweep_grid == [SweepEntry(config_id="a", mechanism="suppress")]
    effective = config.effective()
    assert effective["sweep-grid"][0]["config_id"] == "a"
    assert parse_pipeline_config(json.dumps(effective)) == config


def test_apply_overrides_revalidates():
    base = DecouplerConfig()
    assert apply_overrides(base, {}, "decoupler") is base
    assert apply_overrides(base, {"beta": 1.0}, "decoupler").beta == 1.0
    with pytest.raises(ConfigError, match="decoupler"):
        apply_overrides(base, {"k": 99}, "decoupler")


def test_batch_size_has_a_floor():
    with pytest.raises(ValidationError):
        DecouplerConfig(batch_size=32)


def test_beta_vae_switches_off_the_other_terms():
    config = DecouplerConfig(alpha2=3.0).beta_vae()
    assert config.alphas == (1.0, 0.0, 0.0, 0.0)
    assert config.beta == 5.0


def test_projection_dimension_defaults_to_at_most_four():
    assert PrivacyBudget().projection_dim(8) == 4
    assert PrivacyBudget().projection_dim(2) == 2
    assert PrivacyBudget(projected_dim=3).projection_dim(8) == 3
    with pytest.raises(ValidationError):
        PrivacyBudget(clip_low=1.0, clip_high=1.0)


def test_report_version_is_checked():
    fields = {"mechanism": "suppress", "sensitive_attribute": "s", "leakage_acc": 0.3,
              "prior_acc": 0.25, "leakage_delta": 0.05}
    assert EvaluationReport(**fields).report_version == 1
    with pytest.raises(ValidationError):
        EvaluationReport(report_version=2, **fields)
