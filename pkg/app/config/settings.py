"""Configuration management using Pydantic Settings"""

import json
from pathlib import Path
from typing import Any, List, Mapping, Optional

from pydantic import ValidationError, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from app import __version__
from app.errors import InvalidInputError


class Settings(BaseSettings):
    """Toolkit settings loaded from environment variables, .env and JSON config files"""

    model_config = SettingsConfigDict(
        env_file=".env",
        case_sensitive=True,
        extra="ignore",  # Ignore extra environment variables
    )

    # Runtime
    LOG_LEVEL: str = "INFO"
    SEED: int = 0

    # Baseband / iqcore
    SAMPLE_RATE_HZ: float = 50e6  # captures span 50 MHz; free parameter
    SEGMENT_LENGTH: int = 512
    SEGMENT_HOP: int = 512
    WELCH_NFFT: int = 512
    WELCH_OVERLAP: float = 0.5
    DB_FLOOR: float = -300.0

    # Surrogate waveforms
    DVBS2_ROLLOFF: float = 0.25
    DVBS2_SAMPLES_PER_SYMBOL: int = 4
    RRC_SPAN_SYMBOLS: int = 8
    LTE_FFT_SIZE: int = 128
    LTE_ACTIVE_SUBCARRIERS: int = 64
    LTE_CP_LENGTH: int = 9
    UMTS_SPREADING_FACTOR: int = 8
    UMTS_CHIP_RATE_RATIO: float = 0.5  # chip rate = ratio * sample rate
    UMTS_ROLLOFF: float = 0.22
    GSM_BT: float = 0.3
    GSM_SAMPLES_PER_SYMBOL: int = 4
    TONE_OFFSET_HZ: float = 0.0

    # Channel
    SNR_DB: float = 20.0
    SIR_LIST_DB: List[float] = [0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0]
    SEGMENTS_PER_POINT: int = 50

    # Sparse autoencoder
    AE_HIDDEN_SIZE: int = 32
    AE_L2_WEIGHT: float = 1e-4
    AE_SPARSITY_PROPORTION: float = 0.1
    AE_SPARSITY_WEIGHT: float = 1.0
    AE_MAX_ITERS: int = 500
    AE_GRAD_TOL: float = 1e-6
    AE_TRAIN_SEGMENTS: int = 200
    AE_CALIBRATION_SEGMENTS: int = 200

    # Detection
    DETECT_VARIANCE_THRESHOLD: float = 0.20
    DETECT_SKEWNESS_THRESHOLD: float = 0.50
    MSE_HISTOGRAM_BINS: int = 50

    # LSTM classifier
    LSTM_HIDDEN_SIZE: int = 128
    LSTM_EPOCHS: int = 20
    LSTM_BATCH_SIZE: int = 32
    LSTM_HOLDOUT_FRACTION: float = 0.2
    LSTM_GRAD_CLIP: float = 1.0  # global L2 norm; 0 disables
    ADAM_LEARNING_RATE: float = 1e-2
    ADAM_BETA1: float = 0.9
    ADAM_BETA2: float = 0.999
    ADAM_EPSILON: float = 1e-8

    @field_validator("WELCH_OVERLAP")
    @classmethod
    def validate_overlap(cls, v: float) -> float:
        if not 0.0 <= v < 1.0:
            raise ValueError("WELCH_OVERLAP must lie in [0, 1)")
        return v

    @field_validator("SAMPLE_RATE_HZ")
    @classmethod
    def validate_sample_rate(cls, v: float) -> float:
        if v <= 0:
            raise ValueError("SAMPLE_RATE_HZ must be positive")
        return v

    @field_validator("AE_SPARSITY_PROPORTION")
    @classmethod
    def validate_sparsity_proportion(cls, v: float) -> float:
        if not 0.0 < v < 1.0:
            raise ValueError("AE_SPARSITY_PROPORTION must lie in (0, 1)")
        return v

    @field_validator("DETECT_VARIANCE_THRESHOLD", "DETECT_SKEWNESS_THRESHOLD")
    @classmethod
    def validate_threshold(cls, v: float) -> float:
        if v <= 0:
            raise ValueError("detection thresholds must be positive")
        return v

    @field_validator("LSTM_GRAD_CLIP")
    @classmethod
    def validate_grad_clip(cls, v: float) -> float:
        if v < 0:
            raise ValueError("LSTM_GRAD_CLIP must be non-negative")
        return v

    def resolved(self) -> dict[str, Any]:
        """Fully-resolved configuration, JSON-serialisable, echoed into artifacts"""
        return self.model_dump(mode="json")

    def provenance(self) -> dict[str, Any]:
        """Provenance block embedded in every JSON artifact"""
        return {
            "tool": "satint",
            "tool_version": __version__,
            "config": self.resolved(),
        }


def load_settings(
    config_path: Optional[str] = None,
    overrides: Optional[Mapping[str, Any]] = None,
) -> Settings:
    """
    Build settings with precedence flags > JSON config file > environment > defaults

    Args:
        config_path: Optional JSON config file with UPPER_CASE keys
        overrides: Values taken from command-line flags (None values are ignored)

    Returns:
        Validated settings
    """
    values: dict[str, Any] = {}

    if config_path is not None:
        path = Path(config_path)
        try:
            with open(path, "r", encoding="utf-8") as f:
                file_values = json.load(f)
        except FileNotFoundError:
            raise InvalidInputError(f"config file not found: {config_path}")
        except json.JSONDecodeError as e:
            raise InvalidInputError(f"config file is not valid JSON: {e}")

        if not isinstance(file_values, dict):
            raise InvalidInputError("config file must contain a JSON object")

        unknown = sorted(set(file_values) - set(Settings.model_fields))
        if unknown:
            raise InvalidInputError(f"unknown config keys: {', '.join(unknown)}")
        values.update(file_values)

    if overrides:
        values.update({k: v for k, v in overrides.items() if v is not None})

    try:
        return Settings(**values)
    except ValidationError as e:
        raise InvalidInputError(f"invalid configuration: {e}")


# Global settings instance
settings = Settings()
