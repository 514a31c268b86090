"""LSTM interference classification"""

from app.lstmclass.features import NormStats, extract_features, raw_features
from app.lstmclass.network import LstmModel, init_lstm, lstm_backward, lstm_forward
from app.lstmclass.optim import AdamHyper, AdamState, adam_step
from app.lstmclass.trainer import TrainingHistory, train_classifier
from app.lstmclass.evaluation import ClassificationReport, evaluate, sir_sweep

__all__ = [
    "NormStats",
    "extract_features",
    "raw_features",
    "LstmModel",
    "init_lstm",
    "lstm_backward",
    "lstm_forward",
    "AdamHyper",
    "AdamState",
    "adam_step",
    "TrainingHistory",
    "train_classifier",
    "ClassificationReport",
    "evaluate",
    "sir_sweep",
]
