"""Four-channel time/spectrum features of IQ segments"""

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from app.artifacts.models import NormStatsModel
from app.errors import InvalidInputError
from app.iqcore.signal import IqSegment
from app.iqcore.spectral import dft

logger = logging.getLogger(__name__)

NUM_CHANNELS = 4
CHANNEL_NAMES = ("time_magnitude", "time_phase", "spectrum_magnitude", "spectrum_phase")


def _phase(z: np.ndarray) -> np.ndarray:
    """arg(z) folded into (-pi, pi]"""
    phase = np.angle(z)
    phase[phase <= -np.pi] = np.pi
    return phase


def raw_features(seg: IqSegment, expected_length: int = 512) -> np.ndarray:
    """
    Un-normalised feature matrix of one segment

    Channel order: |x_n|, arg(x_n), |X_k|, arg(X_k), with the k-th DFT bin
    aligned to time step k.

    Args:
        seg: Segment of expected_length samples
        expected_length: Required segment length T

    Returns:
        Matrix 4 x T
    """
    if len(seg) != expected_length:
        raise InvalidInputError(f"segment has {len(seg)} samples, expected {expected_length}")
    x = seg.samples
    spectrum = dft(seg)
    return np.vstack([np.abs(x), _phase(x), np.abs(spectrum), _phase(spectrum)])


@dataclass(frozen=True)
class NormStats:
    """Per-channel mean and standard deviation of the training features"""

    mean: np.ndarray
    std: np.ndarray

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=np.float64)
        std = np.asarray(self.std, dtype=np.float64)
        if mean.shape != (NUM_CHANNELS,) or std.shape != (NUM_CHANNELS,):
            raise InvalidInputError(f"normalisation statistics must have {NUM_CHANNELS} channels")
        zero = std <= 0
        if np.any(zero):
            names = [CHANNEL_NAMES[i] for i in np.flatnonzero(zero)]
            logger.warning(f"Zero standard deviation for {', '.join(names)}; using 1")
            std = np.where(zero, 1.0, std)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "std", std)

    @classmethod
    def from_raw(cls, raw: np.ndarray) -> "NormStats":
        """
        Statistics over a stack of raw feature matrices

        Args:
            raw: Array N x 4 x T

        Returns:
            NormStats with population (1/n) standard deviations
        """
        raw = np.asarray(raw, dtype=np.float64)
        if raw.ndim != 3 or raw.shape[1] != NUM_CHANNELS or raw.shape[0] == 0:
            raise InvalidInputError("raw features must be a non-empty N x 4 x T stack")
        return cls(mean=raw.mean(axis=(0, 2)), std=raw.std(axis=(0, 2)))

    def apply(self, raw: np.ndarray) -> np.ndarray:
        """z-score the channel axis (second to last) of raw features"""
        return (raw - self.mean[:, np.newaxis]) / self.std[:, np.newaxis]

    def to_model(self) -> NormStatsModel:
        return NormStatsModel(mean=self.mean.tolist(), std=self.std.tolist())

    @classmethod
    def from_model(cls, m: NormStatsModel) -> "NormStats":
        return cls(mean=np.asarray(m.mean), std=np.asarray(m.std))


def extract_features(seg: IqSegment, norm_stats: NormStats, expected_length: int = 512) -> np.ndarray:
    """
    Normalised 4 x T feature matrix of one segment

    Args:
        seg: Segment of expected_length samples
        norm_stats: Training-set statistics
        expected_length: Required segment length T

    Returns:
        z-scored matrix 4 x T
    """
    return norm_stats.apply(raw_features(seg, expected_length))


def stack_raw_features(segments: Sequence[IqSegment], expected_length: int = 512) -> np.ndarray:
    """Raw features of many segments, N x 4 x T"""
    if not segments:
        raise InvalidInputError("no segments")
    return np.stack([raw_features(seg, expected_length) for seg in segments])


def to_sequences(features: np.ndarray) -> np.ndarray:
    """Reorder N x 4 x T feature stacks into N x T x 4 network inputs"""
    return np.ascontiguousarray(np.swapaxes(features, -1, -2))
