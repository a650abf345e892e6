"""
Matching distances between barcodes and signed barcodes.

Pair and deletion costs are closed forms of the interleaving distance
between interval modules (and between an interval module and zero):

* deleting ``[p, q)`` costs ``min_i (q_i - p_i) / 2``, an upset costs inf;
* matching two bars costs the smaller of the endpoint sup-distance and the
  larger of their deletion costs;
* bars of opposite sign never match.
"""

from dataclasses import dataclass
from itertools import chain
import logging
import math
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from persistlab.constants import BRUTEFORCE_CAP
from persistlab.exceptions import CapExceeded, DimensionMismatchError
from persistlab.multigrid import SignedBarcode
from persistlab.persistence1 import Bar, Barcode

logger = logging.getLogger(__name__)

BarsLike = Union[Barcode, SignedBarcode, Sequence[Bar]]


def _bars(B: BarsLike) -> List[Bar]:
    return list(B.bars) if hasattr(B, "bars") else list(B)


def _check_n(bars1: Sequence[Bar], bars2: Sequence[Bar]) -> None:
    ns = {b.n for b in chain(bars1, bars2)}
    if len(ns) > 1:
        raise DimensionMismatchError(f"bars with different parameter counts: {sorted(ns)}")


def bar_deletion_cost(b: Bar) -> float:
    if b.is_infinite:
        return math.inf
    return min(t - s for s, t in zip(b.birth, b.death)) / 2


def endpoint_distance(b1: Bar, b2: Bar) -> float:
    births = max(abs(s - t) for s, t in zip(b1.birth, b2.birth))
    if b1.is_infinite and b2.is_infinite:
        deaths = 0.0
    elif b1.is_infinite or b2.is_infinite:
        deaths = math.inf
    else:
        deaths = max(abs(s - t) for s, t in zip(b1.death, b2.death))
    return max(births, deaths)


def bar_cost(b1: Bar, b2: Bar) -> float:
    if b1.n != b2.n:
        raise DimensionMismatchError(f"cannot compare bars with n={b1.n} and n={b2.n}")
    if b1.sign != b2.sign:
        return math.inf
    return min(endpoint_distance(b1, b2), max(bar_deletion_cost(b1), bar_deletion_cost(b2)))


@dataclass(frozen=True)
class PartialMatching:
    pairs: Tuple[Tuple[int, int], ...] = ()
    unmatched1: Tuple[int, ...] = ()
    unmatched2: Tuple[int, ...] = ()

    def is_valid(self, n1: int, n2: int) -> bool:
        left = [i for i, _ in self.pairs] + list(self.unmatched1)
        right = [j for _, j in self.pairs] + list(self.unmatched2)
        return sorted(left) == list(range(n1)) and sorted(right) == list(range(n2))

    def to_dict(self) -> dict:
        return {
            "pairs": [list(p) for p in self.pairs],
            "unmatched_a": list(self.unmatched1),
            "unmatched_b": list(self.unmatched2),
        }


def matching_costs(B1: BarsLike, B2: BarsLike, matching: PartialMatching) -> List[float]:
    bars1, bars2 = _bars(B1), _bars(B2)
    costs = [bar_cost(bars1[i], bars2[j]) for i, j in matching.pairs]
    costs += [bar_deletion_cost(bars1[i]) for i in matching.unmatched1]
    costs += [bar_deletion_cost(bars2[j]) for j in matching.unmatched2]
    return costs


def _cost_tables(bars1: Sequence[Bar], bars2: Sequence[Bar]):
    pair = np.array([[bar_cost(a, b) for b in bars2] for a in bars1], dtype=np.float64).reshape(len(bars1), len(bars2))
    del1 = np.array([bar_deletion_cost(a) for a in bars1], dtype=np.float64)
    del2 = np.array([bar_deletion_cost(b) for b in bars2], dtype=np.float64)
    return pair, del1, del2


def _perfect_matching(pair, del1, del2, eps: float) -> Optional[np.ndarray]:
    """
    Perfect matching of the doubled bipartite graph (bars of one side plus
    diagonal copies of the other) with every used edge of cost at most eps.
    Returns the column matched to each row, or None.
    """
    n1, n2 = pair.shape
    size = n1 + n2
    if size == 0:
        return np.zeros(0, dtype=np.int64)
    rows, cols = [], []
    for i, j in zip(*np.nonzero(pair <= eps)):
        rows.append(i)
        cols.append(j)
    for i in np.nonzero(del1 <= eps)[0]:
        rows.append(i)
        cols.append(n2 + i)
    for j in np.nonzero(del2 <= eps)[0]:
        rows.append(n1 + j)
        cols.append(j)
    for j in range(n2):
        for i in range(n1):
            rows.append(n1 + j)
            cols.append(n2 + i)
    graph = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(size, size))
    match = maximum_bipartite_matching(graph, perm_type="column")
    if np.any(match < 0):
        return None
    return match


def _decode(match: np.ndarray, n1: int, n2: int) -> PartialMatching:
    pairs, unmatched1, unmatched2 = [], [], []
    for row, col in enumerate(match):
        if row < n1:
            if col < n2:
                pairs.append((row, int(col)))
            else:
                unmatched1.append(row)
        elif col < n2:
            unmatched2.append(int(col))
    return PartialMatching(tuple(pairs), tuple(unmatched1), tuple(sorted(unmatched2)))


def bottleneck(B1: BarsLike, B2: BarsLike) -> Tuple[float, PartialMatching]:
    """
    Bottleneck distance with a witness matching.

    The optimum is one of the pair or deletion costs: binary search over
    their sorted values, testing each with a maximum bipartite matching.
    """
    bars1, bars2 = _bars(B1), _bars(B2)
    _check_n(bars1, bars2)
    pair, del1, del2 = _cost_tables(bars1, bars2)
    n1, n2 = len(bars1), len(bars2)
    values = np.concatenate([pair.reshape(-1), del1, del2, [0.0]])
    candidates = np.unique(values[np.isfinite(values)])

    lo, hi = 0, len(candidates) - 1
    best = None
    while lo <= hi:
        mid = (lo + hi) // 2
        match = _perfect_matching(pair, del1, del2, candidates[mid])
        if match is not None:
            best = (float(candidates[mid]), match)
            hi = mid - 1
        else:
            lo = mid + 1
    if best is None:
        match = _perfect_matching(pair, del1, del2, math.inf)
        return math.inf, _decode(match, n1, n2)
    return best[0], _decode(best[1], n1, n2)


def bottleneck_bruteforce(B1: BarsLike, B2: BarsLike) -> float:
    """Minimum over every partial matching of the largest cost."""
    bars1, bars2 = _bars(B1), _bars(B2)
    _check_n(bars1, bars2)
    if len(bars1) + len(bars2) > BRUTEFORCE_CAP:
        raise CapExceeded(f"brute force accepts at most {BRUTEFORCE_CAP} bars in total")
    pair, del1, del2 = _cost_tables(bars1, bars2)

    def search(i: int, used: frozenset) -> float:
        if i == len(bars1):
            rest = [del2[j] for j in range(len(bars2)) if j not in used]
            return max(rest, default=0.0)
        best = max(del1[i], search(i + 1, used))
        for j in range(len(bars2)):
            if j not in used:
                best = min(best, max(pair[i, j], search(i + 1, used | {j})))
        return best

    return float(search(0, frozenset()))


def dist1(B1: BarsLike, B2: BarsLike) -> Tuple[float, PartialMatching]:
    """
    Minimal total cost of a partial matching, solved as an assignment problem
    on the cost matrix augmented with one deletion slot per bar.
    """
    bars1, bars2 = _bars(B1), _bars(B2)
    _check_n(bars1, bars2)
    pair, del1, del2 = _cost_tables(bars1, bars2)
    n1, n2 = len(bars1), len(bars2)
    if n1 + n2 == 0:
        return 0.0, PartialMatching()

    finite = np.concatenate([pair[np.isfinite(pair)], del1[np.isfinite(del1)], del2[np.isfinite(del2)]])
    big = 1.0 + 2.0 * float(finite.sum()) * (n1 + n2 + 1)
    cost = np.zeros((n1 + n2, n1 + n2))
    cost[:n1, :n2] = pair
    cost[:n1, n2:] = np.where(np.eye(n1, dtype=bool), del1[:, None], math.inf)
    cost[n1:, :n2] = np.where(np.eye(n2, dtype=bool), del2[None, :], math.inf)
    cost[~np.isfinite(cost)] = big
    rows, cols = linear_sum_assignment(cost)

    matching = _decode(cols[np.argsort(rows)], n1, n2)
    total = math.fsum(matching_costs(bars1, bars2, matching))
    return total, matching


def swap_union(S1: SignedBarcode, S2: SignedBarcode) -> Tuple[List[Bar], List[Bar]]:
    """Unsigned bars of ``positive(S1) + negative(S2)`` and ``positive(S2) + negative(S1)``."""
    if S1.n != S2.n:
        raise DimensionMismatchError(f"signed barcodes with n={S1.n} and n={S2.n}")
    left = [b.unsigned() for b in chain(S1.positive, S2.negative)]
    right = [b.unsigned() for b in chain(S2.positive, S1.negative)]
    return left, right


def signed_bottleneck(S1: SignedBarcode, S2: SignedBarcode) -> float:
    left, right = swap_union(S1, S2)
    return bottleneck(left, right)[0]
