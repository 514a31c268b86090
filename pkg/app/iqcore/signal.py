"""Baseband sample containers, segmentation and power measurement"""

from dataclasses import dataclass
from typing import List

import numpy as np

from app.errors import InvalidInputError


@dataclass(frozen=True)
class IqSegment:
    """Immutable vector of complex baseband samples at a given sample rate"""

    samples: np.ndarray
    sample_rate_hz: float

    def __post_init__(self):
        samples = np.array(self.samples, dtype=np.complex128, copy=True).ravel()
        if samples.size == 0:
            raise InvalidInputError("IqSegment requires at least one sample")
        if not np.all(np.isfinite(samples)):
            raise InvalidInputError("IqSegment samples must be finite")
        if not (np.isfinite(self.sample_rate_hz) and self.sample_rate_hz > 0):
            raise InvalidInputError("sample_rate_hz must be positive")
        samples.flags.writeable = False
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "sample_rate_hz", float(self.sample_rate_hz))

    def __len__(self) -> int:
        return self.samples.size

    def scaled(self, factor: complex) -> "IqSegment":
        """Return a copy with every sample multiplied by factor"""
        return IqSegment(self.samples * factor, self.sample_rate_hz)


@dataclass(frozen=True)
class PowerMeasurement:
    """Mean power (linear) of a segment"""

    mean_power: float

    @property
    def db(self) -> float:
        return 10.0 * np.log10(self.mean_power) if self.mean_power > 0 else float("-inf")


def segment(signal: IqSegment, length: int, hop: int) -> List[IqSegment]:
    """
    Cut a signal into fixed-length segments, discarding the trailing remainder

    Args:
        signal: Input signal
        length: Samples per segment
        hop: Stride between segment starts

    Returns:
        floor((N - length) / hop) + 1 segments sharing the input sample rate
    """
    if length < 1 or hop < 1:
        raise InvalidInputError("length and hop must be positive")
    n = len(signal)
    if length > n:
        raise InvalidInputError("segment longer than signal")

    count = (n - length) // hop + 1
    return [
        IqSegment(signal.samples[k * hop : k * hop + length], signal.sample_rate_hz)
        for k in range(count)
    ]


def measure_power(seg: IqSegment) -> PowerMeasurement:
    """Mean of |x_n|^2 over all samples"""
    x = seg.samples
    return PowerMeasurement(float(np.mean(x.real * x.real + x.imag * x.imag)))
