"""Scaled conjugate gradient minimisation (Hessian-free, full batch)"""

import logging
from dataclasses import dataclass, field
from typing import Callable, List, Tuple

import numpy as np

from app.errors import InvalidInputError, TrainingDivergedError

logger = logging.getLogger(__name__)

LossAndGrad = Callable[[np.ndarray], Tuple[float, np.ndarray]]

SIGMA0 = 1e-4
LAMBDA_INIT = 1e-6
LAMBDA_MAX = 1e100
LOG_EVERY = 50


@dataclass
class ScgResult:
    """Outcome of a scaled conjugate gradient run"""

    x: np.ndarray
    loss: float
    grad_inf_norm: float
    iterations: int
    converged: bool
    loss_history: List[float] = field(default_factory=list)
    history_iterations: List[int] = field(default_factory=list)
    restarts: int = 0


def _check_finite(loss: float, grad: np.ndarray, where: str) -> None:
    if not np.isfinite(loss):
        raise TrainingDivergedError(f"non-finite loss {loss} at {where}")
    if not np.all(np.isfinite(grad)):
        raise TrainingDivergedError(f"non-finite gradient at {where}")


def scg_minimize(
    fun: LossAndGrad,
    x0: np.ndarray,
    max_iters: int,
    grad_tol: float,
) -> ScgResult:
    """
    Minimise fun with Moller's scaled conjugate gradient

    Curvature along the search direction comes from a finite difference of
    gradients; the step-size parameter lambda acts as a trust-region scale
    raised on poor quadratic agreement and lowered on good agreement.

    Args:
        fun: Callable returning (loss, gradient) at a flat parameter vector
        x0: Starting point
        max_iters: Iteration budget (>= 1)
        grad_tol: Stop when the max-norm of the gradient drops below this

    Returns:
        ScgResult with the final point and the loss after every accepted step
        (entry 0 is the starting loss)
    """
    if max_iters < 1:
        raise InvalidInputError("max_iters must be at least 1")

    x = np.array(x0, dtype=np.float64, copy=True)
    n_params = x.size
    loss, grad = fun(x)
    _check_finite(loss, grad, "start")

    r = -grad
    p = r.copy()
    lam = LAMBDA_INIT
    success = True
    curvature = 0.0
    since_restart = 0
    restarts = 0
    history = [float(loss)]
    history_iters = [0]
    converged = False
    it = 0

    for it in range(1, max_iters + 1):
        grad_inf = float(np.max(np.abs(r)))
        if grad_inf < grad_tol:
            converged = True
            break

        p_norm2 = float(p @ p)
        if success:
            if float(p @ r) <= 0.0:
                logger.warning(f"SCG iteration {it}: non-descent direction, restarting")
                p = r.copy()
                p_norm2 = float(p @ p)
                since_restart = 0
                restarts += 1
            sigma = SIGMA0 / np.sqrt(p_norm2)
            _, grad_probe = fun(x + sigma * p)
            curvature = float(p @ (grad_probe + r)) / sigma

        delta = curvature + lam * p_norm2
        if delta <= 0.0:
            # make the scaled curvature positive definite
            lam = 2.0 * (lam - delta / p_norm2)
            delta = curvature + lam * p_norm2

        mu = float(p @ r)
        alpha = mu / delta
        x_new = x + alpha * p
        loss_new, grad_new = fun(x_new)
        if not np.isfinite(loss_new):
            raise TrainingDivergedError(f"non-finite loss {loss_new} at SCG iteration {it}")

        comparison = 2.0 * delta * (loss - loss_new) / (mu * mu)
        if comparison >= 0.0:
            _check_finite(loss_new, grad_new, f"SCG iteration {it}")
            r_new = -grad_new
            x, loss = x_new, float(loss_new)
            since_restart += 1
            if since_restart >= n_params:
                p = r_new.copy()
                since_restart = 0
                restarts += 1
            else:
                beta = (float(r_new @ r_new) - float(r_new @ r)) / mu
                p = r_new + beta * p
            r = r_new
            success = True
            history.append(loss)
            history_iters.append(it)
            if comparison >= 0.75:
                lam = lam / 4.0
        else:
            success = False

        if comparison < 0.25:
            lam = min(lam + delta * (1.0 - comparison) / p_norm2, LAMBDA_MAX)

        if it % LOG_EVERY == 0:
            logger.info(f"SCG iteration {it}: loss={loss:.6g} |g|inf={np.max(np.abs(r)):.3g} lambda={lam:.3g}")

    grad_inf = float(np.max(np.abs(r)))
    if not converged and grad_inf < grad_tol:
        converged = True

    logger.info(
        f"SCG finished after {it} iterations: loss={loss:.6g}, |g|inf={grad_inf:.3g}, converged={converged}"
    )
    return ScgResult(
        x=x,
        loss=loss,
        grad_inf_norm=grad_inf,
        iterations=it,
        converged=converged,
        loss_history=history,
        history_iterations=history_iters,
        restarts=restarts,
    )
