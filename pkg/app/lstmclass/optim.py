"""Adam optimiser over named parameter arrays"""

from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np

from app.errors import InvalidInputError

Arrays = Dict[str, np.ndarray]


@dataclass(frozen=True)
class AdamHyper:
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8


@dataclass(frozen=True)
class AdamState:
    """First/second moment accumulators and the number of steps taken"""

    m: Arrays
    v: Arrays
    step: int = 0

    @classmethod
    def zeros_like(cls, params: Arrays) -> "AdamState":
        return cls(
            m={k: np.zeros_like(p, dtype=np.float64) for k, p in params.items()},
            v={k: np.zeros_like(p, dtype=np.float64) for k, p in params.items()},
        )


def adam_step(params: Arrays, grads: Arrays, state: AdamState, hyper: AdamHyper) -> Tuple[Arrays, AdamState]:
    """
    One bias-corrected Adam update

    Args:
        params: Current parameters by name
        grads: Gradients with the same names and shapes
        state: Moment accumulators
        hyper: Learning rate, decay rates and epsilon

    Returns:
        Tuple of (new parameters, advanced state); inputs are not modified
    """
    if params.keys() != grads.keys() or params.keys() != state.m.keys():
        raise InvalidInputError("parameter, gradient and state names differ")

    step = state.step + 1
    correction1 = 1.0 - hyper.beta1 ** step
    correction2 = 1.0 - hyper.beta2 ** step

    new_params: Arrays = {}
    new_m: Arrays = {}
    new_v: Arrays = {}
    for name, p in params.items():
        g = grads[name]
        if g.shape != p.shape:
            raise InvalidInputError(f"gradient of {name} has shape {g.shape}, expected {p.shape}")
        m = hyper.beta1 * state.m[name] + (1.0 - hyper.beta1) * g
        v = hyper.beta2 * state.v[name] + (1.0 - hyper.beta2) * g * g
        m_hat = m / correction1
        v_hat = v / correction2
        new_params[name] = p - hyper.learning_rate * m_hat / (np.sqrt(v_hat) + hyper.epsilon)
        new_m[name] = m
        new_v[name] = v

    return new_params, AdamState(m=new_m, v=new_v, step=step)


def clip_by_global_norm(grads: Arrays, max_norm: float) -> Tuple[Arrays, float]:
    """
    Rescale all gradients together so their joint L2 norm is at most max_norm

    Args:
        grads: Gradients by name
        max_norm: Norm ceiling; 0 disables clipping

    Returns:
        Tuple of (possibly rescaled gradients, norm before clipping)
    """
    if max_norm < 0:
        raise InvalidInputError("gradient clipping norm must be non-negative")
    norm = float(np.sqrt(sum(float(np.sum(g * g)) for g in grads.values())))
    if max_norm == 0 or norm <= max_norm:
        return grads, norm
    scale = max_norm / norm
    return {name: g * scale for name, g in grads.items()}, norm
