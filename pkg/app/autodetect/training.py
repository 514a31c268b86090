"""Autoencoder training on interference-free segments"""

import logging
from dataclasses import replace
from typing import Sequence, Tuple

import numpy as np

from app.autodetect.model import (
    InputScale,
    SparseAutoencoder,
    ae_loss_and_grad,
    featurize_batch,
    init_autoencoder,
    interleave_iq,
    segment_digest,
)
from app.autodetect.scg import ScgResult, scg_minimize
from app.config.settings import Settings
from app.errors import InvalidInputError
from app.iqcore.signal import IqSegment

logger = logging.getLogger(__name__)


def scg_train(
    model: SparseAutoencoder,
    data: np.ndarray,
    max_iters: int,
    grad_tol: float,
) -> Tuple[SparseAutoencoder, ScgResult]:
    """
    Full-batch scaled conjugate gradient training

    Args:
        model: Initial autoencoder
        data: Featurized training rows, N x d
        max_iters: Iteration budget
        grad_tol: Max-norm gradient tolerance

    Returns:
        Tuple of (trained model, optimiser result holding the loss history)
    """
    data = np.atleast_2d(np.asarray(data, dtype=np.float64))
    if data.shape[0] == 0:
        raise InvalidInputError("training data is empty")

    def objective(flat: np.ndarray) -> Tuple[float, np.ndarray]:
        return ae_loss_and_grad(model.with_params(flat), data)

    logger.info(
        f"Training autoencoder d={model.input_dim} h={model.hidden_size} on {data.shape[0]} rows"
    )
    result = scg_minimize(objective, model.flat_params(), max_iters=max_iters, grad_tol=grad_tol)
    return model.with_params(result.x), result


def train_autoencoder(
    segments: Sequence[IqSegment],
    run_settings: Settings,
    seed: int,
) -> Tuple[SparseAutoencoder, ScgResult]:
    """
    Fit the input scale, initialise and train an autoencoder on clean segments

    Args:
        segments: Interference-free training segments of equal length
        run_settings: Resolved settings with AE hyperparameters
        seed: Initialisation seed

    Returns:
        Tuple of (trained model, optimiser result)
    """
    if not segments:
        raise InvalidInputError("no training segments")
    lengths = {len(seg) for seg in segments}
    if len(lengths) != 1:
        raise InvalidInputError(f"training segments differ in length: {sorted(lengths)}")

    raw = np.vstack([interleave_iq(seg) for seg in segments])
    scale = InputScale.from_corpus(raw)
    model = init_autoencoder(
        scale,
        hidden_size=run_settings.AE_HIDDEN_SIZE,
        l2_weight=run_settings.AE_L2_WEIGHT,
        sparsity_proportion=run_settings.AE_SPARSITY_PROPORTION,
        sparsity_weight=run_settings.AE_SPARSITY_WEIGHT,
        seed=seed,
    )
    model = replace(model, training_digests=frozenset(segment_digest(seg) for seg in segments))
    return scg_train(
        model,
        featurize_batch(segments, scale),
        max_iters=run_settings.AE_MAX_ITERS,
        grad_tol=run_settings.AE_GRAD_TOL,
    )
