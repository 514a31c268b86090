"""Single-layer LSTM with a dense softmax head: forward pass and BPTT"""

import logging
from dataclasses import dataclass, replace
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
from scipy.special import expit, softmax

from app.artifacts.models import LstmModelFile
from app.errors import InvalidInputError, LabelMismatchError, TrainingDivergedError
from app.lstmclass.features import NUM_CHANNELS, NormStats
from app.wavegen.kinds import parse_label
from app.wavegen.waveforms import make_rng

logger = logging.getLogger(__name__)

GATES = ("i", "f", "o", "g")
PARAM_NAMES = (
    "W_i", "W_f", "W_o", "W_g",
    "U_i", "U_f", "U_o", "U_g",
    "b_i", "b_f", "b_o", "b_g",
    "W_fc", "b_fc",
)

Params = Dict[str, np.ndarray]


@dataclass(frozen=True)
class LstmModel:
    """LSTM classifier parameters, class order and feature normalisation"""

    params: Params
    class_labels: Tuple[str, ...]
    norm_stats: NormStats

    def __post_init__(self):
        missing = [name for name in PARAM_NAMES if name not in self.params]
        if missing:
            raise InvalidInputError(f"LSTM parameters missing: {', '.join(missing)}")
        h, f = self.params["W_i"].shape
        c = len(self.class_labels)
        expected = {"W": (h, f), "U": (h, h), "b": (h,)}
        for gate in GATES:
            for kind, shape in expected.items():
                if self.params[f"{kind}_{gate}"].shape != shape:
                    raise InvalidInputError(f"{kind}_{gate} has shape {self.params[f'{kind}_{gate}'].shape}, expected {shape}")
        if self.params["W_fc"].shape != (c, h) or self.params["b_fc"].shape != (c,):
            raise InvalidInputError("dense head shape does not match the class list")
        for name, value in self.params.items():
            if not np.all(np.isfinite(value)):
                raise InvalidInputError(f"LSTM parameter {name} has non-finite entries")

    @property
    def hidden_size(self) -> int:
        return int(self.params["W_i"].shape[0])

    @property
    def input_size(self) -> int:
        return int(self.params["W_i"].shape[1])

    @property
    def num_classes(self) -> int:
        return len(self.class_labels)

    def with_params(self, params: Params) -> "LstmModel":
        return replace(self, params={name: np.array(params[name], dtype=np.float64) for name in PARAM_NAMES})

    def class_index(self, label: str) -> int:
        try:
            return self.class_labels.index(label)
        except ValueError:
            raise LabelMismatchError(f"label '{label}' is not one of the model classes {list(self.class_labels)}")

    def to_file(self) -> LstmModelFile:
        return LstmModelFile(
            hidden_size=self.hidden_size,
            input_size=self.input_size,
            class_labels=list(self.class_labels),
            norm_stats=self.norm_stats.to_model(),
            params={name: self.params[name].ravel().tolist() for name in PARAM_NAMES},
        )

    @classmethod
    def from_file(cls, f: LstmModelFile) -> "LstmModel":
        if f.version != 1:
            raise InvalidInputError(f"unsupported LSTM file version {f.version}")
        for label in f.class_labels:
            parse_label(label)
        h, n_in, c = f.hidden_size, f.input_size, len(f.class_labels)
        shapes = {"W": (h, n_in), "U": (h, h), "b": (h,)}
        try:
            params = {
                f"{kind}_{gate}": np.asarray(f.params[f"{kind}_{gate}"], dtype=np.float64).reshape(shape)
                for gate in GATES
                for kind, shape in shapes.items()
            }
            params["W_fc"] = np.asarray(f.params["W_fc"], dtype=np.float64).reshape(c, h)
            params["b_fc"] = np.asarray(f.params["b_fc"], dtype=np.float64).reshape(c)
        except (KeyError, ValueError) as e:
            raise InvalidInputError(f"LSTM file has missing or inconsistent parameters: {e}")
        return cls(params=params, class_labels=tuple(f.class_labels), norm_stats=NormStats.from_model(f.norm_stats))


def init_lstm(
    class_labels: Sequence[str],
    norm_stats: NormStats,
    hidden_size: int = 128,
    input_size: int = NUM_CHANNELS,
    seed: int = 0,
) -> LstmModel:
    """
    Uniform(-1/sqrt(H), 1/sqrt(H)) weights, zero biases, forget-gate bias 1

    Args:
        class_labels: Ordered output classes
        norm_stats: Feature normalisation to embed
        hidden_size: H
        input_size: F
        seed: Initialisation seed

    Returns:
        Untrained LstmModel
    """
    if hidden_size < 1 or input_size < 1:
        raise InvalidInputError("hidden and input sizes must be positive")
    rng = make_rng(seed)
    r = 1.0 / np.sqrt(hidden_size)
    params: Params = {}
    for gate in GATES:
        params[f"W_{gate}"] = rng.uniform(-r, r, size=(hidden_size, input_size))
    for gate in GATES:
        params[f"U_{gate}"] = rng.uniform(-r, r, size=(hidden_size, hidden_size))
    for gate in GATES:
        params[f"b_{gate}"] = np.zeros(hidden_size)
    params["b_f"] = np.ones(hidden_size)
    params["W_fc"] = rng.uniform(-r, r, size=(len(class_labels), hidden_size))
    params["b_fc"] = np.zeros(len(class_labels))
    return LstmModel(params=params, class_labels=tuple(class_labels), norm_stats=norm_stats)


def _stacked(params: Params) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    w = np.concatenate([params[f"W_{g}"] for g in GATES], axis=0)
    u = np.concatenate([params[f"U_{g}"] for g in GATES], axis=0)
    b = np.concatenate([params[f"b_{g}"] for g in GATES])
    return w, u, b


@dataclass
class ForwardCache:
    """
    Activations kept for backpropagation

    gates holds the i, f, o, g activations side by side (T x B x 4H); the
    cell, tanh(cell) and hidden states are T x B x H. x is time-major T x B x F.
    """

    x: np.ndarray
    gates: np.ndarray
    c: np.ndarray
    tanh_c: np.ndarray
    h: np.ndarray
    probabilities: np.ndarray


def _check_input(model: LstmModel, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 3 or x.shape[2] != model.input_size or x.shape[1] == 0:
        raise InvalidInputError(f"expected B x T x {model.input_size} inputs, got {x.shape}")
    return x


def lstm_forward_batch(model: LstmModel, x: np.ndarray, keep_cache: bool = True) -> Tuple[np.ndarray, Optional[ForwardCache]]:
    """
    Run the recurrence over a batch of sequences

    Args:
        model: LSTM classifier
        x: Inputs B x T x F
        keep_cache: Keep per-step activations for lstm_backward_batch

    Returns:
        Tuple of (probabilities B x C, cache or None)
    """
    x = _check_input(model, x)
    n_batch, n_steps, _ = x.shape
    hs = model.hidden_size
    w, u, b = _stacked(model.params)
    u_t = np.ascontiguousarray(u.T)

    # input projection of every step at once, time-major
    x_tm = np.ascontiguousarray(np.swapaxes(x, 0, 1))
    pre_x = x_tm @ w.T + b

    h = np.zeros((n_batch, hs))
    c = np.zeros((n_batch, hs))
    if keep_cache:
        gates = np.empty((n_steps, n_batch, 4 * hs))
        cs = np.empty((n_steps, n_batch, hs))
        tcs = np.empty((n_steps, n_batch, hs))
        hs_all = np.empty((n_steps, n_batch, hs))

    for t in range(n_steps):
        z = pre_x[t] + h @ u_t
        sig = expit(z[:, :3 * hs])
        gg = np.tanh(z[:, 3 * hs:])
        c = sig[:, hs:2 * hs] * c + sig[:, :hs] * gg
        tc = np.tanh(c)
        h = sig[:, 2 * hs:] * tc
        if keep_cache:
            gates[t, :, :3 * hs] = sig
            gates[t, :, 3 * hs:] = gg
            cs[t], tcs[t], hs_all[t] = c, tc, h

    logits = h @ model.params["W_fc"].T + model.params["b_fc"]
    if not np.all(np.isfinite(logits)):
        raise TrainingDivergedError("non-finite logits in LSTM forward pass")
    probs = softmax(logits, axis=1)

    if not keep_cache:
        return probs, None
    return probs, ForwardCache(x=x_tm, gates=gates, c=cs, tanh_c=tcs, h=hs_all, probabilities=probs)


def lstm_backward_batch(model: LstmModel, cache: ForwardCache, labels: np.ndarray) -> Tuple[float, Params]:
    """
    Mean cross-entropy over the batch and its exact gradient by BPTT

    Gate pre-activation gradients are kept for every step so the weight
    gradients come out of one product over all steps.

    Args:
        model: Model used for the forward pass
        cache: Cache from lstm_forward_batch
        labels: True class indices, length B

    Returns:
        Tuple of (mean loss, gradient per parameter name)
    """
    labels = np.asarray(labels, dtype=int)
    n_steps, n_batch, hs = cache.h.shape
    if labels.shape != (n_batch,):
        raise InvalidInputError("one label per batch row is required")
    if np.any(labels < 0) or np.any(labels >= model.num_classes):
        raise LabelMismatchError("label index outside the model classes")
    _, u, _ = _stacked(model.params)

    probs = cache.probabilities
    rows = np.arange(n_batch)
    loss = -float(np.mean(np.log(np.maximum(probs[rows, labels], np.finfo(float).tiny))))

    d_logits = probs.copy()
    d_logits[rows, labels] -= 1.0
    d_logits /= n_batch

    grads: Params = {
        "W_fc": d_logits.T @ cache.h[-1],
        "b_fc": d_logits.sum(axis=0),
    }

    dz_all = np.empty((n_steps, n_batch, 4 * hs))
    dh = d_logits @ model.params["W_fc"]
    dc = np.zeros((n_batch, hs))
    zeros = np.zeros((n_batch, hs))

    for t in range(n_steps - 1, -1, -1):
        s = cache.gates[t]
        gi, gf, go, gg = s[:, :hs], s[:, hs:2 * hs], s[:, 2 * hs:3 * hs], s[:, 3 * hs:]
        tc = cache.tanh_c[t]
        c_prev = cache.c[t - 1] if t > 0 else zeros

        dc = dc + dh * go * (1.0 - tc * tc)
        dz = dz_all[t]
        dz[:, :hs] = dc * gg * gi * (1.0 - gi)
        dz[:, hs:2 * hs] = dc * c_prev * gf * (1.0 - gf)
        dz[:, 2 * hs:3 * hs] = dh * tc * go * (1.0 - go)
        dz[:, 3 * hs:] = dc * gi * (1.0 - gg * gg)

        dh = dz @ u
        dc = dc * gf

    h_prev = np.concatenate([zeros[np.newaxis], cache.h[:-1]], axis=0)
    flat_dz = dz_all.reshape(n_steps * n_batch, 4 * hs)
    d_w = flat_dz.T @ cache.x.reshape(n_steps * n_batch, -1)
    d_u = flat_dz.T @ h_prev.reshape(n_steps * n_batch, hs)
    d_b = flat_dz.sum(axis=0)

    for k, gate in enumerate(GATES):
        sl = slice(k * hs, (k + 1) * hs)
        grads[f"W_{gate}"] = d_w[sl]
        grads[f"U_{gate}"] = d_u[sl]
        grads[f"b_{gate}"] = d_b[sl]
    return loss, grads


def lstm_forward(model: LstmModel, features: np.ndarray) -> Tuple[np.ndarray, ForwardCache]:
    """
    Class probabilities of one feature matrix

    Args:
        model: LSTM classifier
        features: Matrix F x T (channels by time)

    Returns:
        Tuple of (probabilities length C, cache for lstm_backward)
    """
    features = np.asarray(features, dtype=np.float64)
    if features.ndim != 2:
        raise InvalidInputError("features must be a channels x time matrix")
    probs, cache = lstm_forward_batch(model, features.T[np.newaxis, :, :])
    return probs[0], cache


def lstm_backward(model: LstmModel, cache: ForwardCache, true_class: int) -> Params:
    """Gradient of -log p_true for a single-sequence cache"""
    _, grads = lstm_backward_batch(model, cache, np.array([true_class]))
    return grads


def predict_proba(model: LstmModel, sequences: np.ndarray, batch_size: int = 128) -> np.ndarray:
    """Probabilities N x C for normalised inputs N x T x F, evaluated in fixed-order chunks"""
    out = [
        lstm_forward_batch(model, sequences[start:start + batch_size], keep_cache=False)[0]
        for start in range(0, sequences.shape[0], batch_size)
    ]
    return np.vstack(out)

