"""
Finite simplicial complexes, monotone multi-parameter filtrations on them and
the Rips construction with its derivative.

Vertex ids are 0-based. The fixed total order on simplices orders by
dimension first and then lexicographically on the sorted vertex tuple.
"""

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
import logging
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial.distance import pdist, squareform

from persistlab.constants import RIPS_MAXDIM
from persistlab.exceptions import (
    DimensionMismatchError,
    InvalidParametersError,
    MonotonicityViolation,
    StratumBoundary,
)

logger = logging.getLogger(__name__)

Simplex = Tuple[int, ...]


def complex_key(simplex: Sequence[int]) -> Tuple[int, Tuple[int, ...]]:
    """Sort key of the fixed order on simplices: dimension, then vertex tuple."""
    return (len(simplex), tuple(simplex))


@dataclass(frozen=True)
class SimplicialComplex:
    simplices: Tuple[Simplex, ...]
    simplex_index: Dict[Simplex, int] = field(init=False, repr=False, compare=False)
    facets: Tuple[Tuple[int, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        simplices = tuple(tuple(int(v) for v in s) for s in self.simplices)
        if any(list(s) != sorted(set(s)) or not s for s in simplices):
            raise InvalidParametersError("simplices must be nonempty sorted vertex tuples")
        if list(simplices) != sorted(simplices, key=complex_key):
            raise InvalidParametersError("simplices must be listed in (dimension, lexicographic) order")
        index = {s: k for k, s in enumerate(simplices)}
        if len(index) != len(simplices):
            raise InvalidParametersError("duplicate simplex")
        facets = []
        for s in simplices:
            if len(s) == 1:
                facets.append(())
                continue
            ids = []
            for drop in range(len(s)):
                face = s[:drop] + s[drop + 1:]
                if face not in index:
                    raise InvalidParametersError(f"complex is not closed under faces: {face} missing")
                ids.append(index[face])
            facets.append(tuple(ids))
        object.__setattr__(self, "simplices", simplices)
        object.__setattr__(self, "simplex_index", index)
        object.__setattr__(self, "facets", tuple(facets))

    def __len__(self) -> int:
        return len(self.simplices)

    @property
    def dimensions(self) -> np.ndarray:
        return np.array([len(s) - 1 for s in self.simplices], dtype=np.int64)

    @property
    def max_dimension(self) -> int:
        return max((len(s) - 1 for s in self.simplices), default=-1)

    @property
    def vertex_count(self) -> int:
        return len({v for s in self.simplices for v in s})


def complex_from_simplices(simplices: Iterable[Sequence[int]]) -> SimplicialComplex:
    """Face closure of ``simplices``, listed in the fixed order."""
    closed = set()
    for s in simplices:
        s = tuple(sorted(set(int(v) for v in s)))
        for size in range(1, len(s) + 1):
            closed.update(combinations(s, size))
    return SimplicialComplex(tuple(sorted(closed, key=complex_key)))


@lru_cache(maxsize=32)
def full_complex(vertex_count: int, maxdim: int) -> SimplicialComplex:
    """All simplices on ``vertex_count`` vertices up to dimension ``maxdim``."""
    simplices = []
    for size in range(1, min(maxdim + 1, vertex_count) + 1):
        simplices.extend(combinations(range(vertex_count), size))
    return SimplicialComplex(tuple(simplices))


@dataclass(frozen=True, eq=False)
class MonotoneFiltration:
    complex: SimplicialComplex
    values: np.ndarray

    @property
    def n(self) -> int:
        return self.values.shape[1]

    def __len__(self) -> int:
        return len(self.complex)

    def value(self, sid: int) -> np.ndarray:
        return self.values[sid]

    def __eq__(self, other) -> bool:
        if not isinstance(other, MonotoneFiltration):
            return NotImplemented
        return self.complex == other.complex and np.array_equal(self.values, other.values)


def validate_monotone(values, complex: SimplicialComplex) -> MonotoneFiltration:
    """
    Check that ``values`` lies in the monotone cone over ``complex``.

    ``values`` holds one n-vector per simplex (a flat array is read as n = 1).
    Raises ``MonotonicityViolation`` naming the first face, coface and 0-based
    component whose inequality fails.
    """
    arr = np.array(values, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2 or arr.shape[0] != len(complex):
        raise DimensionMismatchError(
            f"expected one value vector per simplex ({len(complex)}), got shape {arr.shape}"
        )
    if not np.all(np.isfinite(arr)):
        raise InvalidParametersError("filtration values must be finite")
    for sid, facet_ids in enumerate(complex.facets):
        for face in facet_ids:
            bad = np.nonzero(arr[face] > arr[sid])[0]
            if bad.size:
                raise MonotonicityViolation(
                    complex.simplices[face], complex.simplices[sid], int(bad[0])
                )
    arr.flags.writeable = False
    return MonotoneFiltration(complex, arr)


def sublevel_mask(filtration: MonotoneFiltration, t) -> np.ndarray:
    """Boolean mask of the simplices with value componentwise at most ``t``."""
    level = np.asarray(t, dtype=np.float64).reshape(-1)
    return np.all(filtration.values <= level, axis=1)


def simplex_order(filtration: MonotoneFiltration) -> np.ndarray:
    """Simplex ids sorted by value, ties broken by the fixed complex order."""
    if filtration.n != 1:
        raise InvalidParametersError(f"simplex order needs a 1-parameter filtration, got n={filtration.n}")
    return np.argsort(filtration.values[:, 0], kind="stable")


# =============================================================================
# Rips
# =============================================================================


@dataclass(frozen=True, eq=False)
class PointCloud:
    points: np.ndarray

    def __post_init__(self):
        pts = np.array(self.points, dtype=np.float64)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        if pts.ndim != 2 or pts.shape[0] < 1:
            raise InvalidParametersError("a point cloud needs at least one point")
        if not np.all(np.isfinite(pts)):
            raise InvalidParametersError("point coordinates must be finite")
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)

    @property
    def r(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]

    @property
    def m(self) -> int:
        return self.points.size

    def flat(self) -> np.ndarray:
        return self.points.reshape(-1).copy()

    @classmethod
    def from_flat(cls, x, d: int) -> "PointCloud":
        return cls(np.asarray(x, dtype=np.float64).reshape(-1, d))

    def distances(self) -> np.ndarray:
        return squareform(pdist(self.points)) if self.r > 1 else np.zeros((1, 1))

    def diameter(self) -> float:
        return float(pdist(self.points).max()) if self.r > 1 else 0.0

    def __eq__(self, other) -> bool:
        if not isinstance(other, PointCloud):
            return NotImplemented
        return np.array_equal(self.points, other.points)


def scale_cloud(cloud: PointCloud, nu: float) -> PointCloud:
    if nu <= 0:
        raise InvalidParametersError(f"scale factor must be positive, got {nu}")
    return PointCloud(cloud.points * nu)


def _realizing_edges(cloud: PointCloud, complex: SimplicialComplex) -> Tuple[np.ndarray, np.ndarray]:
    """
    Per simplex, its longest pairwise distance and the vertex pair realizing
    it (first pair in lexicographic order on ties, ``(-1, -1)`` on vertices).
    """
    dist = cloud.distances()
    values = np.zeros(len(complex))
    edges = np.full((len(complex), 2), -1, dtype=np.int64)
    by_size: Dict[int, List[int]] = {}
    for sid, s in enumerate(complex.simplices):
        by_size.setdefault(len(s), []).append(sid)
    for size, ids in by_size.items():
        if size == 1:
            continue
        verts = np.array([complex.simplices[sid] for sid in ids], dtype=np.int64)
        pairs = list(combinations(range(size), 2))
        lengths = np.stack([dist[verts[:, a], verts[:, b]] for a, b in pairs], axis=1)
        best = np.argmax(lengths, axis=1)
        rows = np.arange(len(ids))
        values[ids] = lengths[rows, best]
        chosen = np.array(pairs, dtype=np.int64)[best]
        edges[ids, 0] = verts[rows, chosen[:, 0]]
        edges[ids, 1] = verts[rows, chosen[:, 1]]
    return values, edges


def rips_filtration(cloud: PointCloud, maxdim: Optional[int] = None) -> MonotoneFiltration:
    """
    Rips filtration of ``cloud``: vertices at 0 and every higher simplex at
    its longest pairwise distance, over all simplices up to ``maxdim``.
    """
    maxdim = RIPS_MAXDIM if maxdim is None else maxdim
    if maxdim < 0:
        raise InvalidParametersError(f"maxdim must be nonnegative, got {maxdim}")
    complex = full_complex(cloud.r, maxdim)
    values, _ = _realizing_edges(cloud, complex)
    arr = values.reshape(-1, 1)
    arr.flags.writeable = False
    return MonotoneFiltration(complex, arr)


@dataclass(frozen=True)
class StratumSignature:
    order: Tuple[Tuple[int, int], ...]
    boundary: bool


def stratum_signature(cloud: PointCloud) -> StratumSignature:
    """
    Label pairs sorted by distance. ``boundary`` is set when two distances
    tie or one vanishes, i.e. the cloud is off every top-dimensional stratum.
    """
    if cloud.r < 2:
        return StratumSignature((), False)
    dist = pdist(cloud.points)
    pairs = list(combinations(range(cloud.r), 2))
    order = np.argsort(dist, kind="stable")
    ranked = dist[order]
    boundary = bool(ranked[0] == 0.0 or np.any(np.diff(ranked) == 0.0))
    return StratumSignature(tuple(pairs[k] for k in order), boundary)


def require_generic(cloud: PointCloud) -> StratumSignature:
    signature = stratum_signature(cloud)
    if signature.boundary:
        raise StratumBoundary("pairwise distances are not all nonzero and distinct")
    return signature


def edge_partial(cloud: PointCloud, edge: Tuple[int, int], i: int) -> np.ndarray:
    a, b = edge
    if i not in (a, b):
        return np.zeros(cloud.d)
    other = b if i == a else a
    delta = cloud.points[i] - cloud.points[other]
    return delta / np.linalg.norm(delta)


def rips_partial(cloud: PointCloud, simplex: Sequence[int], i: int) -> np.ndarray:
    """
    Partial derivative of the Rips value of ``simplex`` with respect to point
    ``i``: the unit vector from the other endpoint of the realizing edge when
    ``i`` is on it, zero otherwise.
    """
    require_generic(cloud)
    simplex = tuple(sorted(int(v) for v in simplex))
    if len(simplex) < 2:
        return np.zeros(cloud.d)
    dist = cloud.distances()
    pairs = list(combinations(simplex, 2))
    edge = max(pairs, key=lambda p: dist[p[0], p[1]])
    return edge_partial(cloud, edge, i)


def rips_edges(cloud: PointCloud, filtration: MonotoneFiltration) -> np.ndarray:
    """Realizing edge of every simplex of a Rips filtration of ``cloud``."""
    return _realizing_edges(cloud, filtration.complex)[1]
