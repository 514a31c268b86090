"""Classifier evaluation: confusion matrices, accuracy and RMSE, overall and per SIR"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from sklearn.metrics import confusion_matrix

from app.artifacts.models import ClassificationReportFile, SirBreakdownModel
from app.errors import InvalidInputError
from app.iqcore.signal import IqSegment
from app.lstmclass.features import stack_raw_features, to_sequences
from app.lstmclass.network import LstmModel, predict_proba
from app.wavegen.dataset import LabeledDataset, build_dataset, derive_seed
from app.wavegen.waveforms import WaveformSpec

logger = logging.getLogger(__name__)

OVERALL = "overall"


@dataclass(frozen=True)
class ClassMetrics:
    """Metrics over one group of segments"""

    num_segments: int
    confusion_matrix: np.ndarray
    accuracy: float
    accuracy_per_class: List[Optional[float]]
    rmse: float
    rmse_per_class: List[Optional[float]]


@dataclass(frozen=True)
class ClassificationReport:
    """Overall metrics plus a breakdown per SIR tag (ascending)"""

    class_labels: Tuple[str, ...]
    overall: ClassMetrics
    per_sir: List[Tuple[float, ClassMetrics]] = field(default_factory=list)

    @property
    def confusion_matrix(self) -> np.ndarray:
        return self.overall.confusion_matrix

    @property
    def accuracy_overall(self) -> float:
        return self.overall.accuracy

    @property
    def rmse(self) -> float:
        return self.overall.rmse

    def to_file(self) -> ClassificationReportFile:
        return ClassificationReportFile(
            class_labels=list(self.class_labels),
            num_segments=self.overall.num_segments,
            confusion_matrix=self.overall.confusion_matrix.tolist(),
            accuracy_overall=self.overall.accuracy,
            accuracy_per_class=self.overall.accuracy_per_class,
            rmse=self.overall.rmse,
            rmse_per_class=self.overall.rmse_per_class,
            per_sir=[
                SirBreakdownModel(
                    sir_db=sir,
                    num_segments=m.num_segments,
                    accuracy=m.accuracy,
                    accuracy_per_class=m.accuracy_per_class,
                    rmse=m.rmse,
                    rmse_per_class=m.rmse_per_class,
                    confusion_matrix=m.confusion_matrix.tolist(),
                )
                for sir, m in self.per_sir
            ],
        )


def class_metrics(probabilities: np.ndarray, true_idx: np.ndarray, num_classes: int) -> ClassMetrics:
    """
    Confusion matrix, accuracy and RMSE of softmax outputs

    Predictions are the argmax of each row, ties going to the lowest index.
    RMSE is sqrt(mean over segments of mean over classes of (p - onehot)^2).

    Args:
        probabilities: N x C class probabilities
        true_idx: True class index per row
        num_classes: C

    Returns:
        ClassMetrics
    """
    probabilities = np.atleast_2d(np.asarray(probabilities, dtype=np.float64))
    true_idx = np.asarray(true_idx, dtype=int)
    n = true_idx.size
    if n == 0 or probabilities.shape != (n, num_classes):
        raise InvalidInputError(f"expected {n} x {num_classes} probabilities, got {probabilities.shape}")

    predicted = np.argmax(probabilities, axis=1)
    cm = confusion_matrix(true_idx, predicted, labels=np.arange(num_classes))

    onehot = np.eye(num_classes)[true_idx]
    per_segment = np.mean((probabilities - onehot) ** 2, axis=1)

    truth_counts = cm.sum(axis=1)
    accuracy_per_class = [float(cm[c, c] / truth_counts[c]) if truth_counts[c] else None for c in range(num_classes)]
    rmse_per_class = [
        float(np.sqrt(np.mean(per_segment[true_idx == c]))) if truth_counts[c] else None for c in range(num_classes)
    ]
    return ClassMetrics(
        num_segments=n,
        confusion_matrix=cm,
        accuracy=float(np.trace(cm) / n),
        accuracy_per_class=accuracy_per_class,
        rmse=float(np.sqrt(np.mean(per_segment))),
        rmse_per_class=rmse_per_class,
    )


def build_report(
    probabilities: np.ndarray,
    true_idx: np.ndarray,
    sir_tags: Sequence[float],
    class_labels: Sequence[str],
) -> ClassificationReport:
    """Overall and per-SIR metrics from precomputed probabilities"""
    sir_tags = np.asarray(sir_tags, dtype=np.float64)
    c = len(class_labels)
    per_sir = [
        (float(sir), class_metrics(probabilities[sir_tags == sir], np.asarray(true_idx)[sir_tags == sir], c))
        for sir in np.unique(sir_tags)
    ]
    return ClassificationReport(
        class_labels=tuple(class_labels),
        overall=class_metrics(probabilities, true_idx, c),
        per_sir=per_sir,
    )


def classify_segments(model: LstmModel, segments: Sequence[IqSegment], segment_length: int = 512) -> np.ndarray:
    """Class probabilities N x C of raw segments"""
    raw = stack_raw_features(list(segments), segment_length)
    return predict_proba(model, to_sequences(model.norm_stats.apply(raw)))


def evaluate(model: LstmModel, dataset: LabeledDataset, segment_length: int = 512) -> ClassificationReport:
    """
    Evaluate a classifier on a labeled dataset

    Args:
        model: Trained classifier
        dataset: Labeled segments whose labels the model knows
        segment_length: Required segment length T

    Returns:
        ClassificationReport
    """
    if not len(dataset):
        raise InvalidInputError("evaluation dataset is empty")
    true_idx = np.array([model.class_index(item.label.value) for item in dataset], dtype=int)
    probs = classify_segments(model, [item.segment for item in dataset], segment_length)
    report = build_report(probs, true_idx, [item.sir_db for item in dataset], model.class_labels)
    logger.info(f"Evaluated {len(dataset)} segments: accuracy={report.accuracy_overall:.4f} rmse={report.rmse:.4f}")
    return report


def sir_sweep(
    model: LstmModel,
    classes: Sequence[WaveformSpec],
    intended: WaveformSpec,
    sir_list_db: Sequence[float],
    segments_per_point: int,
    seed: int,
    snr_db: float = 20.0,
) -> List[Tuple[float, ClassificationReport]]:
    """
    Evaluate on a fresh dataset at every SIR point

    Args:
        model: Trained classifier
        classes: Interferer specs in class order
        intended: Intended-signal spec
        sir_list_db: SIR points, in output order
        segments_per_point: Segments per class at each point
        seed: Master seed; each point gets its own derived seed
        snr_db: SNR of every segment

    Returns:
        List of (sir_db, report) pairs
    """
    if not sir_list_db:
        raise InvalidInputError("SIR list is empty")
    results = []
    for k, sir in enumerate(sir_list_db):
        dataset = build_dataset(classes, intended, [sir], segments_per_point, derive_seed(seed, k), snr_db=snr_db)
        report = evaluate(model, dataset, intended.num_samples)
        logger.info(f"SIR {sir:g} dB: accuracy={report.accuracy_overall:.4f} rmse={report.rmse:.4f}")
        results.append((float(sir), report))
    return results


def sweep_table(results: Sequence[Tuple[float, ClassificationReport]]) -> pd.DataFrame:
    """Rows sir_db,class,accuracy,rmse: one overall row then one per class at every SIR"""
    rows = []
    for sir, report in results:
        m = report.overall
        rows.append({"sir_db": sir, "class": OVERALL, "accuracy": m.accuracy, "rmse": m.rmse})
        for c, label in enumerate(report.class_labels):
            rows.append(
                {"sir_db": sir, "class": label, "accuracy": m.accuracy_per_class[c], "rmse": m.rmse_per_class[c]}
            )
    return pd.DataFrame(rows, columns=["sir_db", "class", "accuracy", "rmse"])


def confusion_table(cm: np.ndarray, class_labels: Sequence[str]) -> pd.DataFrame:
    """Confusion matrix with a leading true_class column, predicted classes as columns"""
    frame = pd.DataFrame(np.asarray(cm, dtype=int), columns=list(class_labels))
    frame.insert(0, "true_class", list(class_labels))
    return frame
