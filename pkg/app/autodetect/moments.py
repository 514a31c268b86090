"""MSE vectors and their first four moments"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from app.artifacts.models import MomentsModel
from app.errors import DegenerateDistributionError, InvalidInputError


@dataclass(frozen=True)
class MseVector:
    """Per-segment mean squared reconstruction errors, in segment order"""

    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64).ravel()
        if values.size == 0:
            raise InvalidInputError("MSE vector is empty")
        if not np.all(np.isfinite(values)) or np.any(values < 0):
            raise InvalidInputError("MSE values must be finite and nonnegative")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return int(self.values.size)


@dataclass(frozen=True)
class MomentSummary:
    """Mean, sample variance, skewness and kurtosis; the last two absent for zero variance"""

    mean: float
    variance: float
    skewness: Optional[float] = None
    kurtosis: Optional[float] = None

    def to_model(self) -> MomentsModel:
        return MomentsModel(mean=self.mean, variance=self.variance, skewness=self.skewness, kurtosis=self.kurtosis)

    @classmethod
    def from_model(cls, m: MomentsModel) -> "MomentSummary":
        return cls(mean=m.mean, variance=m.variance, skewness=m.skewness, kurtosis=m.kurtosis)


def moments(v: MseVector, include_higher: bool = True) -> MomentSummary:
    """
    First four moments of an MSE vector

    Variance uses the 1/(N-1) normalisation; skewness and kurtosis average
    with 1/N and standardise by powers of that variance.

    Args:
        v: MSE vector with at least two entries
        include_higher: Compute skewness and kurtosis (requires nonzero variance)

    Returns:
        MomentSummary
    """
    x = v.values
    n = x.size
    if n < 2:
        raise InvalidInputError("at least two values are required for moments")

    mean = float(np.mean(x))
    centered = x - mean
    variance = float(np.sum(centered ** 2) / (n - 1))

    if not include_higher:
        return MomentSummary(mean=mean, variance=variance)
    if variance == 0.0:
        raise DegenerateDistributionError("degenerate distribution: zero variance, skewness/kurtosis undefined")

    skewness = float(np.mean(centered ** 3) / variance ** 1.5)
    kurtosis = float(np.mean(centered ** 4) / variance ** 2)
    return MomentSummary(mean=mean, variance=variance, skewness=skewness, kurtosis=kurtosis)
