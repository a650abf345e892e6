from persistlab.optim.engine import (
    BoundednessWarning,
    DescentState,
    Schedule,
    clarke_sample,
    run,
    sgd_step,
)
from persistlab.optim.functionals import Functional, FunctionalFactory

__all__ = [
    "BoundednessWarning",
    "DescentState",
    "Functional",
    "FunctionalFactory",
    "Schedule",
    "clarke_sample",
    "run",
    "sgd_step",
]
