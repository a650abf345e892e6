"""Objective functionals over flattened point clouds."""

from abc import ABC, abstractmethod
import logging
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from persistlab.constants import BOX_RADIUS, EXPERIMENT_DEGREE
from persistlab.exceptions import DimensionMismatchError, InvalidParametersError
from persistlab.filtration import PointCloud
from persistlab.liftdiff import (
    chain_rule,
    dist1_loss_gradient,
    pers_jacobian,
    rips_barcode,
    total_persistence,
    total_persistence_gradient,
)
from persistlab.metrics import dist1
from persistlab.optim.engine import clarke_sample
from persistlab.persistence1 import Barcode

logger = logging.getLogger(__name__)


class Functional(ABC):
    """Real-valued function of a flat vector with a gradient on its smooth part."""

    @abstractmethod
    def evaluate(self, x: np.ndarray) -> float:
        pass

    @abstractmethod
    def gradient(self, x: np.ndarray) -> np.ndarray:
        """Gradient at ``x``; raises ``StratumBoundary`` where none exists."""
        pass

    @abstractmethod
    def descriptor(self) -> str:
        pass

    def subgradient(self, x: np.ndarray, rng: Optional[np.random.Generator] = None) -> np.ndarray:
        return clarke_sample(self, x, rng)

    def __str__(self) -> str:
        return self.descriptor()


class QuadraticFunctional(Functional):
    """``sum_i w_i (x_i - c_i)^2``."""

    def __init__(self, weights=1.0, center=0.0):
        self.weights = np.asarray(weights, dtype=np.float64)
        self.center = np.asarray(center, dtype=np.float64)
        if np.any(self.weights < 0):
            raise InvalidParametersError("quadratic weights must be non-negative")

    def evaluate(self, x: np.ndarray) -> float:
        delta = np.asarray(x, dtype=np.float64) - self.center
        return float(np.sum(self.weights * delta ** 2))

    def gradient(self, x: np.ndarray) -> np.ndarray:
        delta = np.asarray(x, dtype=np.float64) - self.center
        return 2.0 * self.weights * delta

    def descriptor(self) -> str:
        return "quadratic"


class _CloudFunctional(Functional):
    """Base for functionals that read ``x`` as ``r`` points in ``R^d``."""

    def __init__(self, d: int):
        if d < 1:
            raise InvalidParametersError(f"point dimension must be positive, got {d}")
        self.d = d

    def cloud(self, x: np.ndarray) -> PointCloud:
        x = np.asarray(x, dtype=np.float64).reshape(-1)
        if x.shape[0] % self.d:
            raise DimensionMismatchError(f"vector of length {x.shape[0]} is not a cloud in R^{self.d}")
        return PointCloud.from_flat(x, self.d)


class TotalPersistenceFunctional(_CloudFunctional):
    """
    ``sign * total_persistence`` of the Rips barcode in ``degree``.

    With ``sign=-1`` minimizing it spreads the bars out. The last barcode and
    gradient are cached by the bytes of ``x``.
    """

    def __init__(self, d: int, degree: int = EXPERIMENT_DEGREE, sign: int = -1):
        super().__init__(d)
        if sign not in (1, -1):
            raise InvalidParametersError(f"sign must be +1 or -1, got {sign}")
        self.degree = degree
        self.sign = sign
        self._values: Dict[bytes, float] = {}
        self._grads: Dict[bytes, np.ndarray] = {}

    @staticmethod
    def _key(x: np.ndarray) -> bytes:
        return np.asarray(x, dtype=np.float64).tobytes()

    def evaluate(self, x: np.ndarray) -> float:
        key = self._key(x)
        if key not in self._values:
            self._values = {key: self.sign * total_persistence(rips_barcode(self.cloud(x), self.degree))}
        return self._values[key]

    def gradient(self, x: np.ndarray) -> np.ndarray:
        key = self._key(x)
        if key not in self._grads:
            lifted, J = pers_jacobian(self.cloud(x), self.degree)
            grad = self.sign * chain_rule(total_persistence_gradient(lifted.k), J)
            self._grads = {key: grad}
        return self._grads[key]

    def descriptor(self) -> str:
        prefix = "-" if self.sign < 0 else ""
        return f"{prefix}total_persistence(H{self.degree} Rips)"


def box_regularizer(cloud: PointCloud, lam: float, radius: float = BOX_RADIUS) -> Tuple[float, np.ndarray]:
    """
    ``lam * sum_a max(0, |a|_inf - radius)`` and a subgradient shaped like
    the points: ``lam * sign`` on the first coordinate of largest magnitude
    of every point outside the box.
    """
    if lam < 0:
        raise InvalidParametersError(f"lambda must be non-negative, got {lam}")
    pts = cloud.points
    magnitude = np.abs(pts)
    norms = magnitude.max(axis=1)
    value = float(lam * np.maximum(0.0, norms - radius).sum())
    grad = np.zeros_like(pts)
    outside = np.nonzero(norms > radius)[0]
    axis = np.argmax(magnitude, axis=1)[outside]
    grad[outside, axis] = lam * np.sign(pts[outside, axis])
    return value, grad


class BoxRegularizer(_CloudFunctional):
    def __init__(self, d: int, lam: float, radius: float = BOX_RADIUS):
        super().__init__(d)
        if lam < 0:
            raise InvalidParametersError(f"lambda must be non-negative, got {lam}")
        self.lam = lam
        self.radius = radius

    def evaluate(self, x: np.ndarray) -> float:
        return box_regularizer(self.cloud(x), self.lam, self.radius)[0]

    def gradient(self, x: np.ndarray) -> np.ndarray:
        return box_regularizer(self.cloud(x), self.lam, self.radius)[1].reshape(-1)

    def descriptor(self) -> str:
        return f"{self.lam:g}*box(|a|_inf <= {self.radius:g})"


class Dist1Functional(_CloudFunctional):
    """``dist_1`` between the Rips barcode in ``degree`` and a fixed target."""

    def __init__(self, d: int, target: Barcode, degree: int = EXPERIMENT_DEGREE):
        super().__init__(d)
        if target.n != 1:
            raise InvalidParametersError("the target barcode must have one parameter")
        self.target = target
        self.degree = degree

    def evaluate(self, x: np.ndarray) -> float:
        return dist1(rips_barcode(self.cloud(x), self.degree), self.target)[0]

    def gradient(self, x: np.ndarray) -> np.ndarray:
        cloud = self.cloud(x)
        _, J = pers_jacobian(cloud, self.degree)
        loss_grad = dist1_loss_gradient(rips_barcode(cloud, self.degree), self.target)
        return chain_rule(loss_grad, J)

    def descriptor(self) -> str:
        return f"dist1(H{self.degree} Rips, target of {len(self.target)} bars)"


class SumFunctional(Functional):
    def __init__(self, terms: Sequence[Functional]):
        if not terms:
            raise InvalidParametersError("a sum needs at least one term")
        self.terms = tuple(terms)

    def evaluate(self, x: np.ndarray) -> float:
        return float(sum(term.evaluate(x) for term in self.terms))

    def gradient(self, x: np.ndarray) -> np.ndarray:
        return np.sum([term.gradient(x) for term in self.terms], axis=0)

    def descriptor(self) -> str:
        return " + ".join(term.descriptor() for term in self.terms)


class FunctionalFactory:
    """Factory for the functionals a run config can name."""

    def __init__(self):
        self.functionals = {
            "quadratic": QuadraticFunctional,
            "total_persistence": TotalPersistenceFunctional,
            "box": BoxRegularizer,
            "dist1": Dist1Functional,
        }

    def create(self, name: str, **kwargs) -> Functional:
        if name not in self.functionals:
            raise InvalidParametersError(
                f"unknown functional {name!r}; choose from {sorted(self.functionals)}"
            )
        return self.functionals[name](**kwargs)

    def holes(self, d: int, lam: float, degree: int = EXPERIMENT_DEGREE) -> Functional:
        """``-total_persistence`` plus, for ``lam > 0``, the box regularizer."""
        persistence = self.create("total_persistence", d=d, degree=degree, sign=-1)
        if lam == 0:
            return persistence
        return SumFunctional([persistence, self.create("box", d=d, lam=lam)])
