"""Received-signal mixer: intended signal, scaled interferer and AWGN"""

import logging
import math
from typing import Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, ValidationError, field_validator, model_validator

from app.errors import InvalidInputError
from app.iqcore.signal import IqSegment, measure_power
from app.wavegen.waveforms import complex_awgn, make_rng

logger = logging.getLogger(__name__)


class MixSpec(BaseModel):
    """Channel parameters: SNR and SIR in dB, beta filled in by the mixer"""
    model_config = ConfigDict(frozen=True)

    snr_db: float
    sir_db: float
    beta: Optional[float] = None

    @field_validator("snr_db")
    @classmethod
    def validate_snr(cls, v: float) -> float:
        if not math.isfinite(v):
            raise ValueError("snr_db must be finite")
        return v

    @field_validator("sir_db")
    @classmethod
    def validate_sir(cls, v: float) -> float:
        if math.isnan(v) or v == float("-inf"):
            raise ValueError("sir_db must be finite or +inf")
        return v

    @model_validator(mode="after")
    def validate_beta(self) -> "MixSpec":
        if self.beta is None:
            return self
        if not math.isfinite(self.beta) or self.beta < 0:
            raise ValueError("beta must be a finite non-negative scale")
        if (self.beta == 0.0) != self.interference_free:
            raise ValueError("beta is zero exactly when sir_db is +inf")
        return self

    @property
    def interference_free(self) -> bool:
        return self.sir_db == float("inf")

    def realised(self, intended_power: float, interference_power: float) -> "MixSpec":
        """Validated copy with beta computed from measured powers"""
        beta = scale_for_sir(intended_power, interference_power, self.sir_db)
        try:
            return MixSpec.model_validate({**self.model_dump(), "beta": beta})
        except ValidationError as e:
            raise InvalidInputError(f"SIR {self.sir_db} dB cannot be realised: {e}")


def scale_for_sir(intended_power: float, interference_power: float, sir_db: float) -> float:
    """beta = P_x / (10^(sir/10) * P_i); zero when sir_db is +inf"""
    if sir_db == float("inf"):
        return 0.0
    if interference_power <= 0:
        raise InvalidInputError("interference has zero power; SIR cannot be realised")
    return intended_power / (10.0 ** (sir_db / 10.0) * interference_power)


def mix(
    intended: IqSegment,
    interference: IqSegment,
    spec: MixSpec,
    seed: int,
) -> Tuple[IqSegment, float]:
    """
    Build y = sqrt(rho) * (x + sqrt(beta) * i) + w

    Args:
        intended: Intended signal x
        interference: Interferer i, same length and rate as x
        spec: SNR/SIR in dB
        seed: Seed of the unit-power noise realisation w

    Returns:
        Tuple of (received segment, realised beta)
    """
    if len(intended) != len(interference):
        raise InvalidInputError(
            f"intended and interference lengths differ ({len(intended)} vs {len(interference)})"
        )
    if intended.sample_rate_hz != interference.sample_rate_hz:
        raise InvalidInputError(
            f"intended and interference sample rates differ "
            f"({intended.sample_rate_hz} vs {interference.sample_rate_hz})"
        )

    realised = spec.realised(measure_power(intended).mean_power, measure_power(interference).mean_power)
    beta = realised.beta
    rho = 10.0 ** (spec.snr_db / 10.0)
    noise = complex_awgn(make_rng(seed), len(intended))

    if beta == 0.0:
        combined = intended.samples
    else:
        combined = intended.samples + np.sqrt(beta) * interference.samples
    received = np.sqrt(rho) * combined + noise

    return IqSegment(received, intended.sample_rate_hz), beta
