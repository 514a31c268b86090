"""Tests for settings resolution"""

import json

import pytest

from app.config.settings import Settings, load_settings
from app.errors import InvalidInputError


def _write(path, payload):
    path.write_text(json.dumps(payload))
    return str(path)


def test_defaults():
    s = Settings()
    assert s.SEGMENT_LENGTH == 512
    assert s.SIR_LIST_DB == [0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0]
    assert s.DETECT_VARIANCE_THRESHOLD == 0.20


def test_environment_overrides_defaults(monkeypatch):
    monkeypatch.setenv("SNR_DB", "15")
    monkeypatch.setenv("SIR_LIST_DB", "[0, 10]")
    s = load_settings()
    assert s.SNR_DB == 15.0
    assert s.SIR_LIST_DB == [0.0, 10.0]


def test_precedence(monkeypatch, tmp_path):
    monkeypatch.setenv("SNR_DB", "15")
    monkeypatch.setenv("WELCH_NFFT", "1024")
    config = _write(tmp_path / "c.json", {"SNR_DB": 12.0, "SEED": 7})

    s = load_settings(config, {"SEED": 9, "SEGMENT_LENGTH": None})
    assert s.SNR_DB == 12.0  # file beats environment
    assert s.SEED == 9  # flag beats file
    assert s.WELCH_NFFT == 1024  # environment beats default
    assert s.SEGMENT_LENGTH == 512


def test_unknown_keys(tmp_path):
    with pytest.raises(InvalidInputError, match="BOGUS"):
        load_settings(_write(tmp_path / "c.json", {"BOGUS": 1}))


def test_invalid_value(tmp_path):
    with pytest.raises(InvalidInputError):
        load_settings(_write(tmp_path / "c.json", {"WELCH_OVERLAP": 1.5}))


def test_thresholds_must_be_positive():
    with pytest.raises(InvalidInputError):
        load_settings(overrides={"DETECT_SKEWNESS_THRESHOLD": -0.1})


def test_not_an_object(tmp_path):
    with pytest.raises(InvalidInputError):
        load_settings(_write(tmp_path / "c.json", [1, 2]))


def test_malformed_json(tmp_path):
    path = tmp_path / "c.json"
    path.write_text("{not json")
    with pytest.raises(InvalidInputError):
        load_settings(str(path))


def test_missing_file(tmp_path):
    with pytest.raises(InvalidInputError):
        load_settings(str(tmp_path / "absent.json"))


def test_provenance_echoes_config():
    s = load_settings(overrides={"SEED": 3})
    block = s.provenance()
    assert block["tool"] == "satint"
    assert block["config"]["SEED"] == 3
    json.dumps(block, allow_nan=False)
