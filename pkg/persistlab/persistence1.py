"""
One-parameter persistent homology.

``reduce`` runs the column reduction of the boundary matrix in filtration
order and keeps the birth/death simplex of every bar; ``barcode_of_an_module``
reads a barcode off the rank function of an abstract A_n module.
"""

from dataclasses import dataclass
import logging
import math
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from persistlab.chains import ChainComplex
from persistlab.exceptions import DimensionMismatchError, InvalidParametersError
from persistlab.f2linalg import F2Matrix, block_diagonal, rank
from persistlab.filtration import MonotoneFiltration, simplex_order, sublevel_mask

logger = logging.getLogger(__name__)


# =============================================================================
# Bars
# =============================================================================


@dataclass(frozen=True)
class Bar:
    """A hook ``[birth, death)`` or, with ``death=None``, a principal upset."""

    birth: Tuple[float, ...]
    death: Optional[Tuple[float, ...]] = None
    sign: int = 1

    def __post_init__(self):
        birth = tuple(float(v) for v in np.atleast_1d(self.birth))
        death = None if self.death is None else tuple(float(v) for v in np.atleast_1d(self.death))
        if self.sign not in (1, -1):
            raise InvalidParametersError(f"bar sign must be +1 or -1, got {self.sign}")
        if death is not None:
            if len(death) != len(birth):
                raise DimensionMismatchError(f"bar endpoints {birth} and {death} differ in length")
            if any(t < s for s, t in zip(birth, death)) or birth == death:
                raise InvalidParametersError(f"[{birth}, {death}) is not a proper hook")
        object.__setattr__(self, "birth", birth)
        object.__setattr__(self, "death", death)

    @property
    def n(self) -> int:
        return len(self.birth)

    @property
    def is_infinite(self) -> bool:
        return self.death is None

    def lift_block(self) -> Tuple[float, ...]:
        """The ``(birth, death, sign)`` block; an upset repeats its birth."""
        end = self.birth if self.death is None else self.death
        return self.birth + end + (float(self.sign),)

    def unsigned(self) -> "Bar":
        return Bar(self.birth, self.death, 1)

    def with_sign(self, sign: int) -> "Bar":
        return Bar(self.birth, self.death, sign)

    def length(self) -> float:
        if self.death is None:
            return math.inf
        return max(t - s for s, t in zip(self.birth, self.death))

    def __str__(self) -> str:
        fmt = (lambda v: f"{v[0]:g}") if self.n == 1 else (lambda v: "(" + ", ".join(f"{c:g}" for c in v) + ")")
        end = "inf" if self.death is None else fmt(self.death)
        prefix = "-" if self.sign < 0 else ""
        return f"{prefix}[{fmt(self.birth)}, {end})"


def sort_bars(bars) -> Tuple[Bar, ...]:
    return tuple(sorted(bars, key=Bar.lift_block))


@dataclass(frozen=True)
class Barcode:
    """Multiset of unsigned bars, stored in lexicographic lift order."""

    n: int
    bars: Tuple[Bar, ...] = ()

    def __post_init__(self):
        bars = sort_bars(self.bars)
        for bar in bars:
            if bar.n != self.n:
                raise DimensionMismatchError(f"bar {bar} does not have {self.n} parameters")
            if bar.sign != 1:
                raise InvalidParametersError("unsigned barcodes hold only positive bars")
        object.__setattr__(self, "bars", bars)

    def __len__(self) -> int:
        return len(self.bars)

    def __iter__(self):
        return iter(self.bars)

    def finite_bars(self) -> List[Bar]:
        return [b for b in self.bars if not b.is_infinite]

    def infinite_count(self) -> int:
        return sum(1 for b in self.bars if b.is_infinite)

    def __add__(self, other: "Barcode") -> "Barcode":
        if self.n != other.n:
            raise DimensionMismatchError(f"cannot join barcodes with n={self.n} and n={other.n}")
        return Barcode(self.n, self.bars + other.bars)


# =============================================================================
# Column reduction
# =============================================================================


@dataclass(frozen=True)
class PersistencePair:
    birth: int
    death: Optional[int]
    degree: int


@dataclass(frozen=True, eq=False)
class PersistencePairs:
    filtration: MonotoneFiltration
    pairs: Tuple[PersistencePair, ...]

    def __len__(self) -> int:
        return len(self.pairs)

    def of_degree(self, degree: int) -> List[PersistencePair]:
        return [p for p in self.pairs if p.degree == degree]

    def values(self, pair: PersistencePair) -> Tuple[float, float]:
        birth = float(self.filtration.values[pair.birth, 0])
        death = math.inf if pair.death is None else float(self.filtration.values[pair.death, 0])
        return birth, death


def reduce(filtration: MonotoneFiltration, max_degree: Optional[int] = None) -> PersistencePairs:
    """
    Persistence pairs of a 1-parameter filtration up to ``max_degree``.

    Columns are reduced from the top dimension down with clearing: a column
    whose simplex was already a pivot is known to reduce to zero. Boundary
    columns are Python int bitsets over filtration order positions.
    """
    complex = filtration.complex
    order = simplex_order(filtration)
    if len(order) == 0:
        return PersistencePairs(filtration, ())
    position = np.empty(len(order), dtype=np.int64)
    position[order] = np.arange(len(order))
    top = complex.max_dimension
    if max_degree is not None:
        top = min(top, max_degree + 1)

    dims = complex.dimensions
    pivot_owner: Dict[int, int] = {}
    reduced: Dict[int, int] = {}
    cleared = set()
    for dim in range(top, 0, -1):
        for pos in range(len(order)):
            sid = int(order[pos])
            if dims[sid] != dim:
                continue
            if pos in cleared:
                continue
            column = 0
            for face in complex.facets[sid]:
                column ^= 1 << int(position[face])
            while column:
                low = column.bit_length() - 1
                owner = pivot_owner.get(low)
                if owner is None:
                    break
                column ^= reduced[owner]
            if column:
                low = column.bit_length() - 1
                pivot_owner[low] = pos
                reduced[pos] = column
                cleared.add(low)

    pairs: List[PersistencePair] = []
    deaths = set(reduced)
    for low, pos in pivot_owner.items():
        birth = int(order[low])
        pairs.append(PersistencePair(birth, int(order[pos]), int(dims[birth])))
    limit = top if max_degree is None else max_degree
    for pos in range(len(order)):
        sid = int(order[pos])
        if pos in deaths or pos in pivot_owner:
            continue
        if dims[sid] > limit:
            continue
        pairs.append(PersistencePair(sid, None, int(dims[sid])))
    pairs.sort(key=lambda p: (p.degree, int(position[p.birth])))
    logger.debug(f"reduced {len(order)} simplices into {len(pairs)} pairs")
    return PersistencePairs(filtration, tuple(pairs))


def barcode(pairs: PersistencePairs, degree: int) -> Barcode:
    """Bars of ``degree``; zero-length pairs are dropped."""
    bars = []
    for pair in pairs.of_degree(degree):
        birth, death = pairs.values(pair)
        if death == birth:
            continue
        bars.append(Bar((birth,), None if math.isinf(death) else (death,)))
    return Barcode(1, tuple(bars))


# =============================================================================
# A_n modules
# =============================================================================


@dataclass(frozen=True, eq=False)
class AnModule:
    dims: Tuple[int, ...]
    maps: Tuple[F2Matrix, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        maps = tuple(self.maps)
        if len(maps) != max(len(dims) - 1, 0):
            raise DimensionMismatchError(f"{len(dims)} spaces need {len(dims) - 1} maps, got {len(maps)}")
        for i, f in enumerate(maps):
            if f.shape != (dims[i + 1], dims[i]):
                raise DimensionMismatchError(
                    f"map {i} -> {i + 1} has shape {f.shape}, expected {(dims[i + 1], dims[i])}"
                )
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "maps", maps)

    @property
    def k(self) -> int:
        return len(self.dims)

    @classmethod
    def from_dense(cls, dims: Sequence[int], maps: Sequence) -> "AnModule":
        converted = []
        for i, m in enumerate(maps):
            arr = np.asarray(m, dtype=np.int64).reshape(dims[i + 1], dims[i])
            converted.append(F2Matrix.from_dense(arr))
        return cls(tuple(dims), tuple(converted))


def rank_function(M: AnModule) -> np.ndarray:
    """``r[i, j]`` = rank of the composite map from index ``i`` to ``j`` (``i <= j``)."""
    r = np.zeros((M.k, M.k), dtype=np.int64)
    for i in range(M.k):
        composite = F2Matrix.identity(M.dims[i])
        r[i, i] = M.dims[i]
        for j in range(i + 1, M.k):
            composite = M.maps[j - 1] @ composite
            r[i, j] = rank(composite)
            if r[i, j] == 0:
                break
    return r


def barcode_of_an_module(M: AnModule) -> Barcode:
    """
    Interval decomposition of ``M`` with integer grades.

    The multiplicity of ``[i, j+1)`` is the inclusion-exclusion of ranks
    ``r(i,j) - r(i-1,j) - r(i,j+1) + r(i-1,j+1)``; the last index ``k-1``
    yields the bars ``[i, inf)``.
    """
    r = rank_function(M)
    k = M.k

    def at(i: int, j: int) -> int:
        if i < 0 or j >= k or i > j:
            return 0
        return int(r[i, j])

    bars = []
    for i in range(k):
        for j in range(i, k):
            if j == k - 1:
                count = at(i, j) - at(i - 1, j)
                bars.extend([Bar((i,), None)] * count)
            else:
                count = at(i, j) - at(i - 1, j) - at(i, j + 1) + at(i - 1, j + 1)
                bars.extend([Bar((i,), (j + 1,))] * count)
    return Barcode(1, tuple(bars))


def an_module_of_barcode(bars: Barcode, k: int) -> AnModule:
    """Direct sum of interval modules on ``0..k-1`` realizing an integer-graded barcode."""
    spans = []
    for bar in bars:
        start = int(bar.birth[0])
        stop = k if bar.is_infinite else int(bar.death[0])
        if not 0 <= start < stop <= k:
            raise InvalidParametersError(f"bar {bar} does not fit in {k} indices")
        spans.append((start, stop))
    dims = tuple(sum(1 for s, t in spans if s <= i < t) for i in range(k))
    maps = []
    for i in range(k - 1):
        blocks = []
        for s, t in spans:
            src = 1 if s <= i < t else 0
            dst = 1 if s <= i + 1 < t else 0
            blocks.append(F2Matrix.from_dense(np.ones((dst, src), dtype=np.uint8)))
        maps.append(block_diagonal(blocks) if blocks else F2Matrix.zeros(0, 0))
    return AnModule(dims, tuple(maps))


def homology_an_module(filtration: MonotoneFiltration, degree: int) -> Tuple[AnModule, np.ndarray]:
    """
    Homology in ``degree`` at every distinct filtration value, with the maps
    induced by the inclusions of consecutive sublevel complexes.
    """
    if filtration.n != 1:
        raise InvalidParametersError("homology_an_module needs a 1-parameter filtration")
    levels = np.unique(filtration.values[:, 0])
    chains = ChainComplex(filtration.complex)
    bases = [chains.homology(sublevel_mask(filtration, t), degree) for t in levels]
    maps = tuple(chains.induced_map(bases[i], bases[i + 1]) for i in range(len(bases) - 1))
    return AnModule(tuple(b.dim for b in bases), maps), levels


def regrade(bars: Barcode, levels: Sequence[float]) -> Barcode:
    """Replace integer grades by the filtration values they index."""
    out = []
    for bar in bars:
        birth = (float(levels[int(bar.birth[0])]),)
        death = None if bar.is_infinite else (float(levels[int(bar.death[0])]),)
        out.append(Bar(birth, death))
    return Barcode(1, tuple(out))
