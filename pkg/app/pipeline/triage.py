"""Two-stage triage: detection first, classification only when interference is found"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence

import numpy as np

from app.artifacts.models import TriageReport
from app.autodetect.detector import DetectionDecision, DetectorCalibration, detect
from app.autodetect.model import SparseAutoencoder
from app.iqcore.signal import IqSegment
from app.lstmclass.evaluation import classify_segments
from app.lstmclass.network import LstmModel

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TriageResult:
    """Detection decision plus, when detected, the majority interferer class"""

    decision: DetectionDecision
    predicted_class: Optional[str] = None
    votes: Dict[str, int] = field(default_factory=dict)
    mean_probabilities: Dict[str, float] = field(default_factory=dict)

    def to_report(self, calibration: DetectorCalibration) -> TriageReport:
        return TriageReport(
            detection=self.decision.to_report(calibration),
            predicted_class=self.predicted_class,
            votes=self.votes,
            mean_probabilities=self.mean_probabilities,
        )


def triage(
    detector_model: SparseAutoencoder,
    calibration: DetectorCalibration,
    classifier: LstmModel,
    segments: Sequence[IqSegment],
) -> TriageResult:
    """
    Detect interference over the segments and classify it when present

    Args:
        detector_model: Trained autoencoder
        calibration: Detector baseline and thresholds
        classifier: Trained LSTM classifier
        segments: Segments under test

    Returns:
        TriageResult; the class fields stay empty when nothing is detected
    """
    decision = detect(detector_model, calibration, segments)
    if not decision.interference_detected:
        return TriageResult(decision=decision)

    probs = classify_segments(classifier, segments, len(segments[0]))
    predicted = np.argmax(probs, axis=1)
    counts = np.bincount(predicted, minlength=classifier.num_classes)
    labels = classifier.class_labels

    # ties go to the lowest class index
    majority = labels[int(np.argmax(counts))]
    logger.info(f"Interference classified as {majority} ({counts.tolist()} votes over {labels})")
    return TriageResult(
        decision=decision,
        predicted_class=majority,
        votes={label: int(n) for label, n in zip(labels, counts)},
        mean_probabilities={label: float(p) for label, p in zip(labels, probs.mean(axis=0))},
    )
