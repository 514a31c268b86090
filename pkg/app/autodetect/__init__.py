"""Sparse autoencoder interference detection"""

from app.autodetect.model import (
    InputScale,
    SparseAutoencoder,
    ae_loss_and_grad,
    featurize_segment,
    init_autoencoder,
    reconstruct,
)
from app.autodetect.scg import ScgResult, scg_minimize
from app.autodetect.training import scg_train, train_autoencoder
from app.autodetect.moments import MomentSummary, MseVector, moments
from app.autodetect.detector import (
    DetectionDecision,
    DetectorCalibration,
    calibrate,
    detect,
    mse_vector,
)

__all__ = [
    "InputScale",
    "SparseAutoencoder",
    "ae_loss_and_grad",
    "featurize_segment",
    "init_autoencoder",
    "reconstruct",
    "ScgResult",
    "scg_minimize",
    "scg_train",
    "train_autoencoder",
    "MomentSummary",
    "MseVector",
    "moments",
    "DetectionDecision",
    "DetectorCalibration",
    "calibrate",
    "detect",
    "mse_vector",
]
