"""
Stochastic subgradient descent on nonsmooth functionals.

The update is ``x_{i+1} = x_i - alpha_i (g_i + xi_i)`` with ``g_i`` an element
of the Clarke subdifferential and ``xi_i`` isotropic Gaussian noise.
"""

from dataclasses import dataclass, field
import logging
import math
from typing import Callable, List, NamedTuple, Optional
import warnings

import numpy as np
import pandas as pd
from tqdm import tqdm

from persistlab.constants import (
    BOUNDEDNESS_FACTOR,
    CLARKE_MAX_ATTEMPTS,
    CLARKE_PERTURBATION,
    NOISE_SIGMA,
    SCHEDULE_GAMMA,
    SCHEDULE_GAMMA_MAX,
    SCHEDULE_GAMMA_MIN,
)
from persistlab.exceptions import (
    BoundednessWarning,
    DimensionMismatchError,
    InvalidParametersError,
    NonFiniteValue,
    StratumBoundary,
)

logger = logging.getLogger(__name__)

TRACE_COLUMNS = ["step", "F", "grad_norm", "sup_norm"]


@dataclass(frozen=True)
class Schedule:
    """Step sizes ``alpha_i = alpha0 / (1 + i) ** gamma``."""

    alpha0: float
    gamma: float = SCHEDULE_GAMMA

    def __post_init__(self):
        if not (self.alpha0 > 0 and math.isfinite(self.alpha0)):
            raise InvalidParametersError(f"alpha0 must be positive and finite, got {self.alpha0}")
        if not SCHEDULE_GAMMA_MIN < self.gamma <= SCHEDULE_GAMMA_MAX:
            raise InvalidParametersError(
                f"gamma must lie in ({SCHEDULE_GAMMA_MIN}, {SCHEDULE_GAMMA_MAX}], got {self.gamma}"
            )

    def rate(self, i: int) -> float:
        return self.alpha0 / (1.0 + i) ** self.gamma

    def rates(self, count: int) -> np.ndarray:
        return self.alpha0 / (1.0 + np.arange(count, dtype=np.float64)) ** self.gamma


class TraceRecord(NamedTuple):
    step: int
    F: float
    grad_norm: float
    sup_norm: float


@dataclass
class DescentState:
    """Iterate, step counter, random stream and trace of one descent run."""

    x: np.ndarray
    seed: int
    rng: np.random.Generator
    step: int = 0
    sup_norm: float = 0.0
    bound: Optional[float] = None
    bound_exceeded: bool = False
    trace: List[TraceRecord] = field(default_factory=list)

    @classmethod
    def start(cls, x0, seed: int = 0, bound: Optional[float] = None) -> "DescentState":
        x = np.array(x0, dtype=np.float64).reshape(-1)
        return cls(
            x=x,
            seed=seed,
            rng=np.random.default_rng(seed),
            sup_norm=float(np.linalg.norm(x)),
            bound=bound,
        )

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.trace, columns=TRACE_COLUMNS)


def clarke_sample(functional, x, rng: Optional[np.random.Generator] = None) -> np.ndarray:
    """
    An element of the Clarke subdifferential of ``functional`` at ``x``.

    At a differentiable point this is the gradient. When the functional
    reports a stratum boundary, the gradient is taken at a random point at
    distance ``1e-9 * scale`` in an adjacent stratum.
    """
    x = np.asarray(x, dtype=np.float64)
    try:
        return functional.gradient(x)
    except StratumBoundary:
        pass
    rng = rng if rng is not None else np.random.default_rng()
    radius = CLARKE_PERTURBATION * max(1.0, float(np.max(np.abs(x), initial=0.0)))
    for attempt in range(CLARKE_MAX_ATTEMPTS):
        u = rng.uniform(-radius, radius, size=x.shape)
        try:
            grad = functional.gradient(x + u)
        except StratumBoundary:
            continue
        logger.debug(f"Clarke sample found after {attempt + 1} perturbation(s)")
        return grad
    raise StratumBoundary(f"no differentiable point found within {CLARKE_MAX_ATTEMPTS} perturbations")


def sgd_step(state: DescentState, functional, schedule: Schedule, sigma: float = NOISE_SIGMA) -> DescentState:
    """Apply one noisy subgradient update to ``state`` in place and return it."""
    if sigma < 0:
        raise InvalidParametersError(f"noise sigma must be non-negative, got {sigma}")
    value = float(functional.evaluate(state.x))
    if not math.isfinite(value):
        raise NonFiniteValue(f"functional is {value} at step {state.step}")
    grad = np.asarray(clarke_sample(functional, state.x, state.rng), dtype=np.float64)
    if grad.shape != state.x.shape:
        raise DimensionMismatchError(f"subgradient has shape {grad.shape}, iterate has {state.x.shape}")
    if not np.all(np.isfinite(grad)):
        raise NonFiniteValue(f"subgradient is not finite at step {state.step}")

    noise = state.rng.normal(0.0, sigma, size=state.x.shape) if sigma > 0 else 0.0
    state.x = state.x - schedule.rate(state.step) * (grad + noise)
    state.sup_norm = max(state.sup_norm, float(np.linalg.norm(state.x)))
    state.trace.append(TraceRecord(state.step, value, float(np.linalg.norm(grad)), state.sup_norm))
    state.step += 1
    return state


def _check_bound(state: DescentState) -> None:
    if state.bound is None or state.bound_exceeded or state.sup_norm <= state.bound:
        return
    state.bound_exceeded = True
    message = (
        f"iterates left the ball of radius {state.bound:.6g} at step {state.step} "
        f"(sup norm {state.sup_norm:.6g}); the descent may not converge"
    )
    logger.warning(message)
    warnings.warn(message, BoundednessWarning, stacklevel=3)


def run(
    functional,
    x0,
    schedule: Schedule,
    sigma: float = NOISE_SIGMA,
    steps: int = 100,
    stop: Optional[Callable[[DescentState], bool]] = None,
    seed: int = 0,
    bound: Optional[float] = None,
    progress: bool = False,
) -> DescentState:
    """
    Run ``steps`` updates from ``x0``.

    ``bound`` caps the Euclidean norm of the iterates; by default it is
    ``BOUNDEDNESS_FACTOR * max(1, |x0|)``. Crossing it logs a warning and
    issues a ``BoundednessWarning`` once, the run continues. ``stop`` is
    checked after every step.
    """
    if steps < 0:
        raise InvalidParametersError(f"steps must be non-negative, got {steps}")
    state = DescentState.start(x0, seed=seed)
    state.bound = bound if bound is not None else BOUNDEDNESS_FACTOR * max(1.0, state.sup_norm)

    logger.info(f"Starting descent: {steps} steps, alpha0={schedule.alpha0:g}, gamma={schedule.gamma:g}, sigma={sigma:g}")
    for _ in tqdm(range(steps), desc="descent", disable=not progress):
        sgd_step(state, functional, schedule, sigma)
        _check_bound(state)
        if stop is not None and stop(state):
            logger.info(f"Stop condition met at step {state.step}")
            break
    return state
