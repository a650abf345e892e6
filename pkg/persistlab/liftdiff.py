"""
Lifting barcodes into Euclidean space and differentiating through the lift.

Each bar ``[s, t)`` becomes the block ``(s, t, sign)`` and each upset
``[t, inf)`` the block ``(t, t, sign)``; blocks are sorted lexicographically
and positive blocks precede negative ones.
"""

from dataclasses import dataclass
import logging
import math
from typing import List, Optional, Tuple, Union

import numpy as np

from persistlab.constants import FD_STEP_SCALE, RIPS_MAXDIM
from persistlab.exceptions import (
    DimensionMismatchError,
    InvalidParametersError,
    MalformedBlock,
    NonFiniteValue,
    StratumBoundary,
)
from persistlab.filtration import (
    PointCloud,
    StratumSignature,
    edge_partial,
    require_generic,
    rips_edges,
    rips_filtration,
)
from persistlab.metrics import bar_deletion_cost, dist1, endpoint_distance
from persistlab.multigrid import SignedBarcode
from persistlab.persistence1 import Bar, Barcode, PersistencePair, reduce

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class LiftedBarcode:
    n: int
    k: int
    coords: np.ndarray
    signed: bool = False

    @property
    def block_size(self) -> int:
        return 2 * self.n + 1

    def blocks(self) -> np.ndarray:
        return self.coords.reshape(self.k, self.block_size)

    def __eq__(self, other) -> bool:
        if not isinstance(other, LiftedBarcode):
            return NotImplemented
        return (self.n, self.k, self.signed) == (other.n, other.k, other.signed) and np.array_equal(
            self.coords, other.coords
        )


def lift(B: Union[Barcode, SignedBarcode]) -> LiftedBarcode:
    """Concatenate the sorted blocks of the bars of ``B``."""
    signed = isinstance(B, SignedBarcode)
    bars = B.positive + B.negative if signed else B.bars
    coords = np.array([c for bar in bars for c in bar.lift_block()], dtype=np.float64)
    return LiftedBarcode(B.n, len(bars), coords, signed)


def unlift(v: LiftedBarcode) -> Union[Barcode, SignedBarcode]:
    """Left inverse of ``lift``."""
    size = v.block_size
    if v.coords.shape != (v.k * size,):
        raise MalformedBlock(f"expected {v.k} blocks of size {size}, got {v.coords.shape[0]} coordinates")
    bars: List[Bar] = []
    seen_negative = False
    for block in v.blocks():
        s = tuple(float(c) for c in block[:v.n])
        t = tuple(float(c) for c in block[v.n:2 * v.n])
        sign = block[-1]
        if sign not in (1.0, -1.0):
            raise MalformedBlock(f"block {tuple(block)} does not end in +1 or -1")
        if sign < 0 and not v.signed:
            raise MalformedBlock("negative block in an unsigned lift")
        if sign > 0 and seen_negative:
            raise MalformedBlock("positive block after a negative block")
        seen_negative = seen_negative or sign < 0
        if any(b < a for a, b in zip(s, t)):
            raise MalformedBlock(f"block {tuple(block)} ends before it starts")
        bars.append(Bar(s, None if s == t else t, int(sign)))
    if v.signed:
        return SignedBarcode(
            v.n,
            tuple(b for b in bars if b.sign > 0),
            tuple(b for b in bars if b.sign < 0),
        )
    return Barcode(v.n, tuple(bars))


# =============================================================================
# Jacobian of the lifted Rips persistence map
# =============================================================================


@dataclass(frozen=True, eq=False)
class PersJacobian:
    matrix: np.ndarray
    signature: StratumSignature
    assignment: Tuple[Tuple[int, Optional[int]], ...]

    @property
    def shape(self) -> Tuple[int, int]:
        return self.matrix.shape


def _rips_maxdim(degree: int) -> int:
    return max(RIPS_MAXDIM, degree + 1)


def attributed_bars(cloud: PointCloud, degree: int) -> List[Tuple[Bar, PersistencePair]]:
    """
    Nonempty bars of the Rips persistence of ``cloud`` in ``degree`` with the
    pair they come from, in lift order (ties by birth simplex id).
    """
    filtration = rips_filtration(cloud, _rips_maxdim(degree))
    pairs = reduce(filtration, max_degree=degree)
    out = []
    for pair in pairs.of_degree(degree):
        birth, death = pairs.values(pair)
        if birth == death:
            continue
        bar = Bar((birth,), None if math.isinf(death) else (death,))
        out.append((bar, pair))
    out.sort(key=lambda item: (item[0].lift_block(), item[1].birth))
    return out


def rips_barcode(cloud: PointCloud, degree: int) -> Barcode:
    return Barcode(1, tuple(bar for bar, _ in attributed_bars(cloud, degree)))


def pers_jacobian(cloud: PointCloud, degree: int) -> Tuple[LiftedBarcode, PersJacobian]:
    """
    Lifted barcode of the Rips persistence of ``cloud`` and its Jacobian with
    respect to the flattened point coordinates.
    """
    signature = require_generic(cloud)
    filtration = rips_filtration(cloud, _rips_maxdim(degree))
    edges = rips_edges(cloud, filtration)
    items = attributed_bars(cloud, degree)

    d = cloud.d
    matrix = np.zeros((3 * len(items), cloud.m))

    def simplex_row(sid: int) -> np.ndarray:
        row = np.zeros(cloud.m)
        a, b = int(edges[sid, 0]), int(edges[sid, 1])
        if a < 0:
            return row
        row[a * d:(a + 1) * d] = edge_partial(cloud, (a, b), a)
        row[b * d:(b + 1) * d] = edge_partial(cloud, (a, b), b)
        return row

    for l, (bar, pair) in enumerate(items):
        matrix[3 * l] = simplex_row(pair.birth)
        matrix[3 * l + 1] = matrix[3 * l] if pair.death is None else simplex_row(pair.death)

    lifted = lift(Barcode(1, tuple(bar for bar, _ in items)))
    assignment = tuple((pair.birth, pair.death) for _, pair in items)
    return lifted, PersJacobian(matrix, signature, assignment)


# =============================================================================
# Losses
# =============================================================================


def total_persistence(B: Barcode) -> float:
    """Sum of the lengths of the finite bars."""
    if B.n != 1:
        raise InvalidParametersError("total persistence is defined for 1-parameter barcodes")
    return math.fsum(bar.death[0] - bar.birth[0] for bar in B.finite_bars())


def total_persistence_gradient(k: int) -> np.ndarray:
    return np.tile(np.array([-1.0, 1.0, 0.0]), k)


def chain_rule(loss_grad, J: Union[PersJacobian, np.ndarray]) -> np.ndarray:
    """Row vector ``loss_grad`` times the Jacobian."""
    matrix = J.matrix if isinstance(J, PersJacobian) else np.asarray(J, dtype=np.float64)
    grad = np.asarray(loss_grad, dtype=np.float64).reshape(-1)
    if grad.shape[0] != matrix.shape[0]:
        raise DimensionMismatchError(
            f"loss gradient has length {grad.shape[0]}, Jacobian has {matrix.shape[0]} rows"
        )
    return grad @ matrix


def dist1_loss_gradient(B: Barcode, target: Barcode) -> np.ndarray:
    """
    Gradient of dist_1(B, target) in the lifted coordinates of ``B``, holding
    the optimal matching fixed.

    A matched bar moves the endpoint realizing the sup-distance (birth on
    ties) or, when the deletion branch is active, follows the half-length of
    the longer bar. A deleted bar has gradient ``(-1/2, 1/2, 0)``.
    """
    if B.n != 1 or target.n != 1:
        raise InvalidParametersError("dist_1 gradients are defined for 1-parameter barcodes")
    value, matching = dist1(B, target)
    if math.isinf(value):
        raise NonFiniteValue("dist_1 is infinite: unmatched infinite bars")
    grad = np.zeros(3 * len(B))
    for i in matching.unmatched1:
        grad[3 * i:3 * i + 2] = (-0.5, 0.5)
    for i, j in matching.pairs:
        bar, other = B.bars[i], target.bars[j]
        endpoint = endpoint_distance(bar, other)
        deletion = max(bar_deletion_cost(bar), bar_deletion_cost(other))
        if endpoint <= deletion:
            ds = bar.birth[0] - other.birth[0]
            dt = 0.0 if bar.is_infinite else bar.death[0] - other.death[0]
            if endpoint == 0.0:
                continue
            if abs(ds) >= abs(dt):
                grad[3 * i] = math.copysign(1.0, ds)
            else:
                grad[3 * i + 1] = math.copysign(1.0, dt)
        elif bar_deletion_cost(bar) >= bar_deletion_cost(other):
            grad[3 * i:3 * i + 2] = (-0.5, 0.5)
    return grad


# =============================================================================
# Finite-difference oracles
# =============================================================================


def relative_error(a, b) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DimensionMismatchError(f"cannot compare shapes {a.shape} and {b.shape}")
    if a.size == 0:
        return 0.0
    return float(np.max(np.abs(a - b)) / max(1.0, float(np.max(np.abs(b)))))


def fd_step(cloud: PointCloud, scale: float = FD_STEP_SCALE) -> float:
    return scale * max(cloud.diameter(), 1e-12)


def finite_difference_jacobian(cloud: PointCloud, degree: int, step: Optional[float] = None) -> np.ndarray:
    """Central differences of the lifted barcode along every point coordinate."""
    h = fd_step(cloud) if step is None else step
    base = cloud.flat()
    columns = []
    for k in range(base.shape[0]):
        plus, minus = base.copy(), base.copy()
        plus[k] += h
        minus[k] -= h
        up = lift(rips_barcode(PointCloud.from_flat(plus, cloud.d), degree)).coords
        down = lift(rips_barcode(PointCloud.from_flat(minus, cloud.d), degree)).coords
        if up.shape != down.shape:
            raise StratumBoundary("bar count changed under perturbation")
        columns.append((up - down) / (2 * h))
    rows = columns[0].shape[0] if columns else 0
    return np.stack(columns, axis=1) if columns else np.zeros((rows, 0))


def finite_difference_gradient(func, x: np.ndarray, step: float) -> np.ndarray:
    """Central differences of a scalar function of a flat vector."""
    x = np.asarray(x, dtype=np.float64)
    grad = np.zeros_like(x)
    for k in range(x.shape[0]):
        plus, minus = x.copy(), x.copy()
        plus[k] += step
        minus[k] -= step
        grad[k] = (func(plus) - func(minus)) / (2 * step)
    return grad
