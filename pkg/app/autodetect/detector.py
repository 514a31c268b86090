"""Calibration and moment-shift interference detection"""

import logging
from dataclasses import dataclass
from typing import Dict, Optional, Sequence

import numpy as np

from app.artifacts.models import CalibrationFile, DetectionReport
from app.autodetect.model import SparseAutoencoder, featurize_batch, reconstruction_errors, segment_digest
from app.autodetect.moments import MomentSummary, MseVector, moments
from app.errors import InvalidInputError
from app.iqcore.signal import IqSegment

logger = logging.getLogger(__name__)

MOMENT_NAMES = ("mean", "variance", "skewness", "kurtosis")


@dataclass(frozen=True)
class DetectorCalibration:
    """Clean-signal baseline moments and relative-increase thresholds"""

    baseline: MomentSummary
    variance_threshold: float
    skewness_threshold: float
    num_segments: int
    calibrated_on_training_data: bool = False

    def __post_init__(self):
        if self.variance_threshold <= 0 or self.skewness_threshold <= 0:
            raise InvalidInputError("detection thresholds must be positive")

    def to_file(self) -> CalibrationFile:
        return CalibrationFile(
            baseline=self.baseline.to_model(),
            variance_threshold=self.variance_threshold,
            skewness_threshold=self.skewness_threshold,
            num_segments=self.num_segments,
            calibrated_on_training_data=self.calibrated_on_training_data,
        )

    @classmethod
    def from_file(cls, f: CalibrationFile) -> "DetectorCalibration":
        return cls(
            baseline=MomentSummary.from_model(f.baseline),
            variance_threshold=f.variance_threshold,
            skewness_threshold=f.skewness_threshold,
            num_segments=f.num_segments,
            calibrated_on_training_data=f.calibrated_on_training_data,
        )


@dataclass(frozen=True)
class DetectionDecision:
    """Observed moments, their relative change against the baseline, and the verdict"""

    interference_detected: bool
    observed: MomentSummary
    relative_increase: Dict[str, Optional[float]]
    mse: MseVector

    def to_report(self, calibration: DetectorCalibration) -> DetectionReport:
        return DetectionReport(
            interference_detected=self.interference_detected,
            baseline=calibration.baseline.to_model(),
            observed=self.observed.to_model(),
            relative_increase=self.relative_increase,
            variance_threshold=calibration.variance_threshold,
            skewness_threshold=calibration.skewness_threshold,
            num_segments=len(self.mse),
        )


def mse_vector(model: SparseAutoencoder, segments: Sequence[IqSegment]) -> MseVector:
    """
    Reconstruction MSE of every segment, in input order

    Args:
        model: Trained autoencoder
        segments: At least two segments of the model's length

    Returns:
        MseVector
    """
    if len(segments) < 2:
        raise InvalidInputError(f"at least 2 segments are required, got {len(segments)}")
    return MseVector(reconstruction_errors(model, featurize_batch(segments, model.input_scale)))


def relative_increase(observed: Optional[float], baseline: Optional[float]) -> Optional[float]:
    """(observed - baseline) / |baseline|; undefined when either side is missing or the baseline is zero"""
    if observed is None or baseline is None or baseline == 0.0:
        return None
    return (observed - baseline) / abs(baseline)


def calibrate(
    model: SparseAutoencoder,
    clean_segments: Sequence[IqSegment],
    variance_threshold: float,
    skewness_threshold: float,
) -> DetectorCalibration:
    """
    Baseline MSE moments from interference-free segments

    Args:
        model: Trained autoencoder
        clean_segments: Clean segments, ideally disjoint from the training set
        variance_threshold: Relative variance increase flagging interference
        skewness_threshold: Relative skewness increase flagging interference

    Returns:
        DetectorCalibration
    """
    if not clean_segments:
        raise InvalidInputError("calibration requires clean segments")

    reused = sum(1 for seg in clean_segments if segment_digest(seg) in model.training_digests)
    if reused:
        logger.warning(
            f"{reused} of {len(clean_segments)} calibration segments were used for training; "
            f"baseline MSE will be biased low"
        )

    baseline = moments(mse_vector(model, clean_segments))
    logger.info(
        f"Calibrated on {len(clean_segments)} segments: mean={baseline.mean:.6g} "
        f"variance={baseline.variance:.6g} skewness={baseline.skewness:.6g}"
    )
    return DetectorCalibration(
        baseline=baseline,
        variance_threshold=variance_threshold,
        skewness_threshold=skewness_threshold,
        num_segments=len(clean_segments),
        calibrated_on_training_data=reused > 0,
    )


def detect(
    model: SparseAutoencoder,
    calibration: DetectorCalibration,
    segments: Sequence[IqSegment],
) -> DetectionDecision:
    """
    Decide whether the segments carry interference

    Interference is declared when the variance or the skewness of the MSE
    vector rises past its threshold relative to the clean baseline.

    Args:
        model: Trained autoencoder
        calibration: Baseline and thresholds
        segments: At least two segments under test

    Returns:
        DetectionDecision
    """
    mse = mse_vector(model, segments)
    observed = moments(mse)

    increase = {
        name: relative_increase(getattr(observed, name), getattr(calibration.baseline, name))
        for name in MOMENT_NAMES
    }
    var_inc = increase["variance"]
    skew_inc = increase["skewness"]
    detected = bool(
        (var_inc is not None and var_inc > calibration.variance_threshold)
        or (skew_inc is not None and skew_inc > calibration.skewness_threshold)
    )

    logger.info(
        f"Detection over {len(mse)} segments: variance {_pct(var_inc)}, skewness {_pct(skew_inc)} "
        f"-> {'interference' if detected else 'clean'}"
    )
    return DetectionDecision(
        interference_detected=detected,
        observed=observed,
        relative_increase=increase,
        mse=mse,
    )


def _pct(value: Optional[float]) -> str:
    return "n/a" if value is None or not np.isfinite(value) else f"{100.0 * value:+.1f}%"
