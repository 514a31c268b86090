"""Spectral transforms: DFT and Welch power spectral density"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

import numpy as np
import pandas as pd
from scipy import signal as sp_signal

from app.config.settings import settings
from app.errors import InvalidInputError
from app.iqcore.signal import IqSegment

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PsdEstimate:
    """Two-sided PSD on strictly increasing frequencies, power in dB"""

    frequencies_hz: np.ndarray
    power_db: np.ndarray

    def __post_init__(self):
        if self.frequencies_hz.shape != self.power_db.shape:
            raise InvalidInputError("frequency and power vectors differ in length")
        if np.any(np.diff(self.frequencies_hz) <= 0):
            raise InvalidInputError("frequencies must be strictly increasing")
        if not np.all(np.isfinite(self.power_db)):
            raise InvalidInputError("PSD values must be finite")

    @property
    def peak_frequency_hz(self) -> float:
        return float(self.frequencies_hz[int(np.argmax(self.power_db))])


def dft(seg: IqSegment) -> np.ndarray:
    """
    Forward DFT, X_k = sum_n x_n exp(-j 2 pi k n / N), unnormalized

    Args:
        seg: Input segment

    Returns:
        Complex spectrum of the same length, bin order k = 0..N-1
    """
    return np.fft.fft(seg.samples)


def to_db(power: np.ndarray, floor_db: float) -> np.ndarray:
    """10*log10 of linear power, clamped at floor_db"""
    power = np.asarray(power, dtype=np.float64)
    out = np.full(power.shape, floor_db, dtype=np.float64)
    positive = power > 0
    out[positive] = 10.0 * np.log10(power[positive])
    return np.maximum(out, floor_db)


def welch_psd(
    sig: IqSegment,
    nfft: Optional[int] = None,
    overlap_fraction: Optional[float] = None,
    floor_db: Optional[float] = None,
) -> PsdEstimate:
    """
    Hann-windowed averaged periodogram

    Scaled so complex white noise of variance s2 reads s2 / nfft per bin
    before dB conversion.

    Args:
        sig: Input signal
        nfft: Segment and FFT length (defaults to settings)
        overlap_fraction: Overlap between consecutive segments in [0, 1)
        floor_db: dB value reported for zero power

    Returns:
        PSD estimate ordered from -fs/2 to fs/2
    """
    nfft = settings.WELCH_NFFT if nfft is None else nfft
    overlap_fraction = settings.WELCH_OVERLAP if overlap_fraction is None else overlap_fraction
    floor_db = settings.DB_FLOOR if floor_db is None else floor_db

    if nfft < 1:
        raise InvalidInputError("nfft must be positive")
    if nfft > len(sig):
        raise InvalidInputError(f"nfft {nfft} exceeds signal length {len(sig)}")
    if not 0.0 <= overlap_fraction < 1.0:
        raise InvalidInputError("overlap_fraction must lie in [0, 1)")

    noverlap = int(round(overlap_fraction * nfft))
    noverlap = min(noverlap, nfft - 1)

    # fs=1 density scaling gives s2 per bin for white noise; divide by nfft
    freqs, pxx = sp_signal.welch(
        sig.samples,
        fs=1.0,
        window="hann",
        nperseg=nfft,
        noverlap=noverlap,
        nfft=nfft,
        detrend=False,
        return_onesided=False,
        scaling="density",
    )
    pxx = np.fft.fftshift(pxx) / nfft
    freqs = np.fft.fftshift(freqs) * sig.sample_rate_hz

    return PsdEstimate(frequencies_hz=freqs, power_db=to_db(pxx, floor_db))


def write_psd_csv(psd: PsdEstimate, path: Union[str, Path]) -> str:
    """
    Write a PSD estimate as CSV with header frequency_hz,power_db

    Args:
        psd: Estimate to export
        path: Output CSV path

    Returns:
        Path of the written file
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame({"frequency_hz": psd.frequencies_hz, "power_db": psd.power_db})
    frame.to_csv(path, index=False, float_format="%.12g", lineterminator="\n")
    logger.debug(f"PSD written to {path} ({len(frame)} bins)")
    return str(path)
