"""Sparse single-hidden-layer autoencoder: featurization, loss/gradient, reconstruction"""

import hashlib
import logging
from dataclasses import dataclass, field, replace
from typing import FrozenSet, Sequence, Tuple

import numpy as np
from scipy.special import expit

from app.artifacts.models import AutoencoderFile, InputScaleModel
from app.errors import InvalidInputError
from app.iqcore.signal import IqSegment
from app.wavegen.waveforms import make_rng

logger = logging.getLogger(__name__)

SCALE_LOW = 0.1
SCALE_HIGH = 0.9
ACTIVATION_CLAMP = 1e-12


def interleave_iq(seg: IqSegment) -> np.ndarray:
    """Real embedding [I0, Q0, I1, Q1, ...]"""
    out = np.empty(2 * len(seg), dtype=np.float64)
    out[0::2] = seg.samples.real
    out[1::2] = seg.samples.imag
    return out


def segment_digest(seg: IqSegment) -> str:
    """Content hash of a segment's samples, used to spot reuse of training data"""
    return hashlib.sha256(np.ascontiguousarray(seg.samples).tobytes()).hexdigest()


@dataclass(frozen=True)
class InputScale:
    """Per-dimension affine map sending the training corpus range onto [0.1, 0.9]"""

    minimum: np.ndarray
    maximum: np.ndarray

    @classmethod
    def from_corpus(cls, raw: np.ndarray) -> "InputScale":
        """
        Fit the scale to raw (interleaved, unscaled) training rows

        Args:
            raw: Matrix N x d

        Returns:
            Input scale
        """
        raw = np.atleast_2d(np.asarray(raw, dtype=np.float64))
        return cls(minimum=raw.min(axis=0), maximum=raw.max(axis=0))

    @property
    def dim(self) -> int:
        return int(self.minimum.size)

    def apply(self, raw: np.ndarray) -> np.ndarray:
        span = self.maximum - self.minimum
        span = np.where(span > 0, span, 1.0)
        return SCALE_LOW + (SCALE_HIGH - SCALE_LOW) * (raw - self.minimum) / span

    def to_model(self) -> InputScaleModel:
        return InputScaleModel(minimum=self.minimum.tolist(), maximum=self.maximum.tolist())

    @classmethod
    def from_model(cls, m: InputScaleModel) -> "InputScale":
        return cls(minimum=np.asarray(m.minimum, dtype=np.float64), maximum=np.asarray(m.maximum, dtype=np.float64))


def featurize_segment(seg: IqSegment, scale: InputScale) -> np.ndarray:
    """
    Interleave I/Q and apply the stored affine normalisation

    Args:
        seg: Segment of d/2 complex samples
        scale: Normalisation fitted on the training corpus

    Returns:
        Real vector of length d
    """
    if 2 * len(seg) != scale.dim:
        raise InvalidInputError(f"segment has {len(seg)} samples, model expects {scale.dim // 2}")
    return scale.apply(interleave_iq(seg))


def featurize_batch(segments: Sequence[IqSegment], scale: InputScale) -> np.ndarray:
    """Stack featurized segments into an N x d matrix"""
    if not segments:
        raise InvalidInputError("no segments to featurize")
    return np.vstack([featurize_segment(seg, scale) for seg in segments])


@dataclass(frozen=True)
class SparseAutoencoder:
    """Sigmoid encoder, affine decoder, L2 and KL-sparsity regularisation"""

    w_enc: np.ndarray  # h x d
    b_enc: np.ndarray  # h
    w_dec: np.ndarray  # d x h
    b_dec: np.ndarray  # d
    l2_weight: float
    sparsity_proportion: float
    sparsity_weight: float
    input_scale: InputScale
    training_digests: FrozenSet[str] = field(default_factory=frozenset)

    def __post_init__(self):
        h, d = self.w_enc.shape
        if self.b_enc.shape != (h,) or self.w_dec.shape != (d, h) or self.b_dec.shape != (d,):
            raise InvalidInputError("autoencoder weight shapes are inconsistent")
        if self.input_scale.dim != d:
            raise InvalidInputError("input scale dimension does not match the model")
        if not 0.0 < self.sparsity_proportion < 1.0:
            raise InvalidInputError("sparsity proportion must lie in (0, 1)")
        if self.l2_weight < 0 or self.sparsity_weight < 0:
            raise InvalidInputError("regularisation weights must be nonnegative")
        for name in ("w_enc", "b_enc", "w_dec", "b_dec"):
            if not np.all(np.isfinite(getattr(self, name))):
                raise InvalidInputError(f"autoencoder {name} has non-finite entries")

    @property
    def input_dim(self) -> int:
        return int(self.w_enc.shape[1])

    @property
    def hidden_size(self) -> int:
        return int(self.w_enc.shape[0])

    @property
    def num_params(self) -> int:
        return 2 * self.hidden_size * self.input_dim + self.hidden_size + self.input_dim

    def flat_params(self) -> np.ndarray:
        """Parameters in the order w_enc, b_enc, w_dec, b_dec (row-major)"""
        return np.concatenate([self.w_enc.ravel(), self.b_enc, self.w_dec.ravel(), self.b_dec])

    def with_params(self, flat: np.ndarray) -> "SparseAutoencoder":
        h, d = self.hidden_size, self.input_dim
        flat = np.asarray(flat, dtype=np.float64)
        if flat.size != self.num_params:
            raise InvalidInputError(f"expected {self.num_params} parameters, got {flat.size}")
        i = 0
        w_enc = flat[i:i + h * d].reshape(h, d)
        i += h * d
        b_enc = flat[i:i + h]
        i += h
        w_dec = flat[i:i + d * h].reshape(d, h)
        i += d * h
        b_dec = flat[i:i + d]
        return replace(self, w_enc=w_enc.copy(), b_enc=b_enc.copy(), w_dec=w_dec.copy(), b_dec=b_dec.copy())

    def encode(self, x: np.ndarray) -> np.ndarray:
        return expit(x @ self.w_enc.T + self.b_enc)

    def decode(self, a: np.ndarray) -> np.ndarray:
        return a @ self.w_dec.T + self.b_dec

    def to_file(self) -> AutoencoderFile:
        return AutoencoderFile(
            d=self.input_dim,
            h=self.hidden_size,
            l2_weight=self.l2_weight,
            rho_s=self.sparsity_proportion,
            beta_s=self.sparsity_weight,
            input_scale=self.input_scale.to_model(),
            w_enc=self.w_enc.ravel().tolist(),
            b_enc=self.b_enc.tolist(),
            w_dec=self.w_dec.ravel().tolist(),
            b_dec=self.b_dec.tolist(),
            training_digests=sorted(self.training_digests),
        )

    @classmethod
    def from_file(cls, f: AutoencoderFile) -> "SparseAutoencoder":
        if f.version != 1:
            raise InvalidInputError(f"unsupported autoencoder file version {f.version}")
        d, h = f.d, f.h
        try:
            return cls(
                w_enc=np.asarray(f.w_enc, dtype=np.float64).reshape(h, d),
                b_enc=np.asarray(f.b_enc, dtype=np.float64),
                w_dec=np.asarray(f.w_dec, dtype=np.float64).reshape(d, h),
                b_dec=np.asarray(f.b_dec, dtype=np.float64),
                l2_weight=f.l2_weight,
                sparsity_proportion=f.rho_s,
                sparsity_weight=f.beta_s,
                input_scale=InputScale.from_model(f.input_scale),
                training_digests=frozenset(f.training_digests),
            )
        except ValueError as e:
            raise InvalidInputError(f"autoencoder file has inconsistent shapes: {e}")


def init_autoencoder(
    scale: InputScale,
    hidden_size: int,
    l2_weight: float,
    sparsity_proportion: float,
    sparsity_weight: float,
    seed: int,
) -> SparseAutoencoder:
    """
    Random initial autoencoder, weights uniform in +-sqrt(6 / (h + d + 1))

    Args:
        scale: Input normalisation fitted on the training corpus
        hidden_size: h, must be smaller than d
        l2_weight: lambda
        sparsity_proportion: rho_s
        sparsity_weight: beta_s
        seed: Initialisation seed

    Returns:
        Untrained model
    """
    d = scale.dim
    if not 0 < hidden_size < d:
        raise InvalidInputError(f"hidden size must lie in [1, {d - 1}], got {hidden_size}")

    rng = make_rng(seed)
    r = np.sqrt(6.0 / (hidden_size + d + 1))
    return SparseAutoencoder(
        w_enc=rng.uniform(-r, r, size=(hidden_size, d)),
        b_enc=np.zeros(hidden_size),
        w_dec=rng.uniform(-r, r, size=(d, hidden_size)),
        b_dec=np.zeros(d),
        l2_weight=l2_weight,
        sparsity_proportion=sparsity_proportion,
        sparsity_weight=sparsity_weight,
        input_scale=scale,
    )


def kl_sparsity(rho: float, rho_hat: np.ndarray) -> np.ndarray:
    """KL(rho || rho_hat_j) per hidden unit, rho_hat clamped away from 0 and 1"""
    rho_hat = np.clip(rho_hat, ACTIVATION_CLAMP, 1.0 - ACTIVATION_CLAMP)
    return rho * np.log(rho / rho_hat) + (1.0 - rho) * np.log((1.0 - rho) / (1.0 - rho_hat))


def ae_loss_and_grad(model: SparseAutoencoder, batch: np.ndarray) -> Tuple[float, np.ndarray]:
    """
    Reconstruction + L2 + KL sparsity loss and its exact gradient

    Args:
        model: Autoencoder
        batch: Featurized rows, N x d

    Returns:
        Tuple of (loss, gradient flattened like model.flat_params())
    """
    x = np.atleast_2d(np.asarray(batch, dtype=np.float64))
    n, d = x.shape
    if d != model.input_dim:
        raise InvalidInputError(f"batch has {d} columns, model expects {model.input_dim}")

    a = model.encode(x)
    err = model.decode(a) - x

    lam = model.l2_weight
    rho = model.sparsity_proportion
    beta = model.sparsity_weight

    rho_hat = np.clip(a.mean(axis=0), ACTIVATION_CLAMP, 1.0 - ACTIVATION_CLAMP)
    loss = (
        float(np.sum(err * err)) / (n * d)
        + lam * (float(np.sum(model.w_enc ** 2)) + float(np.sum(model.w_dec ** 2)))
        + beta * float(np.sum(kl_sparsity(rho, rho_hat)))
    )

    d_out = 2.0 * err / (n * d)
    g_w_dec = d_out.T @ a + 2.0 * lam * model.w_dec
    g_b_dec = d_out.sum(axis=0)

    d_hidden = d_out @ model.w_dec + beta * (-rho / rho_hat + (1.0 - rho) / (1.0 - rho_hat)) / n
    d_pre = d_hidden * a * (1.0 - a)
    g_w_enc = d_pre.T @ x + 2.0 * lam * model.w_enc
    g_b_enc = d_pre.sum(axis=0)

    grad = np.concatenate([g_w_enc.ravel(), g_b_enc, g_w_dec.ravel(), g_b_dec])
    return loss, grad


def reconstruction_errors(model: SparseAutoencoder, features: np.ndarray) -> np.ndarray:
    """Per-row mean squared reconstruction error of featurized rows"""
    x = np.atleast_2d(features)
    err = model.decode(model.encode(x)) - x
    return np.mean(err * err, axis=1)


def reconstruct(model: SparseAutoencoder, seg: IqSegment) -> Tuple[np.ndarray, float]:
    """
    Reconstruct one segment

    Args:
        model: Trained autoencoder
        seg: Segment of d/2 samples

    Returns:
        Tuple of (reconstruction in featurized space, mse)
    """
    x = featurize_segment(seg, model.input_scale)
    x_hat = model.decode(model.encode(x[np.newaxis, :]))[0]
    diff = x - x_hat
    return x_hat, float(diff @ diff) / x.size
