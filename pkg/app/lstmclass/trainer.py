"""Mini-batch Adam training of the LSTM classifier"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
import pandas as pd

from app.config.settings import Settings
from app.errors import LabelMismatchError
from app.lstmclass.features import NormStats, stack_raw_features, to_sequences
from app.lstmclass.network import LstmModel, init_lstm, lstm_backward_batch, lstm_forward_batch, predict_proba
from app.lstmclass.optim import AdamHyper, AdamState, adam_step, clip_by_global_norm
from app.wavegen.dataset import LabeledDataset, derive_seed
from app.wavegen.kinds import CLASS_ORDER
from app.wavegen.waveforms import make_rng

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EpochRecord:
    epoch: int
    train_loss: float
    holdout_accuracy: Optional[float]


@dataclass
class TrainingHistory:
    """Per-epoch mean training loss and held-out accuracy"""

    epochs: List[EpochRecord] = field(default_factory=list)
    best_epoch: Optional[int] = None

    @property
    def train_loss(self) -> List[float]:
        return [e.train_loss for e in self.epochs]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "epoch": [e.epoch for e in self.epochs],
                "train_loss": [e.train_loss for e in self.epochs],
                "holdout_accuracy": [e.holdout_accuracy for e in self.epochs],
            }
        )


def _label_indices(dataset: LabeledDataset, class_labels: Tuple[str, ...]) -> np.ndarray:
    return np.array([class_labels.index(item.label.value) for item in dataset], dtype=int)


def _require_all_classes(dataset: LabeledDataset, where: str) -> None:
    absent = [label.value for label, n in dataset.class_counts().items() if n == 0]
    if absent:
        raise LabelMismatchError(f"classes absent from {where}: {', '.join(absent)}")


def train_classifier(
    dataset: LabeledDataset,
    run_settings: Settings,
    seed: int,
    segment_length: Optional[int] = None,
) -> Tuple[LstmModel, TrainingHistory]:
    """
    Train an LSTM classifier on a labeled dataset

    Normalisation statistics come from the training split only; the
    held-out split is used for per-epoch accuracy, and the epoch with the
    best held-out accuracy (earliest on ties) is the one returned. Without
    a holdout the last epoch is returned.

    Args:
        dataset: Labeled mixed segments covering every class
        run_settings: LSTM/Adam hyperparameters and holdout fraction
        seed: Seed for the split, initialisation and per-epoch shuffles
        segment_length: Segment length T (defaults to SEGMENT_LENGTH)

    Returns:
        Tuple of (trained model, training history)
    """
    segment_length = segment_length or run_settings.SEGMENT_LENGTH
    _require_all_classes(dataset, "dataset")
    train_set, holdout_set = dataset.split(run_settings.LSTM_HOLDOUT_FRACTION, derive_seed(seed, 0))
    _require_all_classes(train_set, "training split")

    class_labels = tuple(label.value for label in CLASS_ORDER)
    train_raw = stack_raw_features([item.segment for item in train_set], segment_length)
    norm_stats = NormStats.from_raw(train_raw)
    x_train = to_sequences(norm_stats.apply(train_raw))
    y_train = _label_indices(train_set, class_labels)

    x_hold: Optional[np.ndarray] = None
    y_hold: Optional[np.ndarray] = None
    if len(holdout_set):
        x_hold = to_sequences(norm_stats.apply(stack_raw_features([item.segment for item in holdout_set], segment_length)))
        y_hold = _label_indices(holdout_set, class_labels)

    model = init_lstm(class_labels, norm_stats, hidden_size=run_settings.LSTM_HIDDEN_SIZE, seed=derive_seed(seed, 1))
    hyper = AdamHyper(
        learning_rate=run_settings.ADAM_LEARNING_RATE,
        beta1=run_settings.ADAM_BETA1,
        beta2=run_settings.ADAM_BETA2,
        epsilon=run_settings.ADAM_EPSILON,
    )
    params = model.params
    state = AdamState.zeros_like(params)
    batch_size = run_settings.LSTM_BATCH_SIZE
    n_train = x_train.shape[0]

    logger.info(
        f"Training LSTM H={model.hidden_size} on {n_train} segments "
        f"({len(holdout_set)} held out), {run_settings.LSTM_EPOCHS} epochs"
    )

    history = TrainingHistory()
    best_model: Optional[LstmModel] = None
    best_accuracy = -1.0
    for epoch in range(1, run_settings.LSTM_EPOCHS + 1):
        order = make_rng(derive_seed(seed, 2, epoch)).permutation(n_train)
        loss_sum = 0.0
        for start in range(0, n_train, batch_size):
            idx = order[start:start + batch_size]
            _, cache = lstm_forward_batch(model, x_train[idx])
            loss, grads = lstm_backward_batch(model, cache, y_train[idx])
            grads, _ = clip_by_global_norm(grads, run_settings.LSTM_GRAD_CLIP)
            loss_sum += loss * idx.size
            params, state = adam_step(params, grads, state, hyper)
            model = model.with_params(params)

        accuracy = None
        if x_hold is not None:
            predicted = np.argmax(predict_proba(model, x_hold), axis=1)
            accuracy = float(np.mean(predicted == y_hold))

        record = EpochRecord(epoch=epoch, train_loss=loss_sum / n_train, holdout_accuracy=accuracy)
        history.epochs.append(record)
        acc_text = "n/a" if accuracy is None else f"{accuracy:.3f}"
        logger.info(f"Epoch {epoch}/{run_settings.LSTM_EPOCHS}: loss={record.train_loss:.4f} holdout_acc={acc_text}")

        if accuracy is not None and accuracy > best_accuracy:
            best_model, best_accuracy, history.best_epoch = model, accuracy, epoch

    if best_model is None:
        return model, history
    logger.info(f"Keeping epoch {history.best_epoch} (holdout accuracy {best_accuracy:.3f})")
    return best_model, history
