"""
Simplicial chains over F2: boundary matrices, homology of subcomplexes given
by masks, and maps induced by inclusions. This is the brute-force path used
for grid modules and as the oracle of the column reduction.
"""

from dataclasses import dataclass
from typing import Dict, List

import numpy as np

from persistlab.exceptions import InvalidParametersError
from persistlab.f2linalg import F2Matrix, column_space_basis, kernel_basis, rank, solve
from persistlab.filtration import SimplicialComplex


@dataclass(frozen=True, eq=False)
class HomologyBasis:
    """Homology of a subcomplex in one degree.

    Both matrices have one row per simplex of that degree in the whole
    complex: ``boundaries`` spans the boundary space, ``cycles`` holds one
    representative cycle per homology class of the chosen basis.
    """

    boundaries: F2Matrix
    cycles: F2Matrix

    @property
    def dim(self) -> int:
        return self.cycles.cols

    def coordinates(self, cycle) -> np.ndarray:
        """Coordinates of the class of ``cycle`` in the representative basis."""
        basis = F2Matrix.from_dense(
            np.hstack([self.boundaries.to_dense(), self.cycles.to_dense()])
        )
        x = solve(basis, cycle)
        if x is None:
            raise InvalidParametersError("chain is not a cycle of this subcomplex")
        return x[self.boundaries.cols:]


class ChainComplex:
    def __init__(self, complex: SimplicialComplex):
        self.complex = complex
        dims = complex.dimensions
        self.ids_by_dim: Dict[int, np.ndarray] = {
            q: np.nonzero(dims == q)[0] for q in range(-1, complex.max_dimension + 2)
        }
        self._local = {
            q: {int(sid): k for k, sid in enumerate(ids)} for q, ids in self.ids_by_dim.items()
        }
        self._boundary: Dict[int, np.ndarray] = {}

    def boundary_matrix(self, q: int) -> np.ndarray:
        """Dense boundary map from q-chains to (q-1)-chains of the whole complex."""
        if q not in self._boundary:
            cols = self.ids_by_dim.get(q, np.zeros(0, dtype=np.int64))
            rows = self.ids_by_dim.get(q - 1, np.zeros(0, dtype=np.int64))
            mat = np.zeros((len(rows), len(cols)), dtype=np.uint8)
            local = self._local.get(q - 1, {})
            for k, sid in enumerate(cols):
                for face in self.complex.facets[int(sid)]:
                    mat[local[face], k] = 1
            self._boundary[q] = mat
        return self._boundary[q]

    def homology(self, mask: np.ndarray, degree: int) -> HomologyBasis:
        """Homology in ``degree`` of the subcomplex selected by ``mask``."""
        q_ids = self.ids_by_dim.get(degree, np.zeros(0, dtype=np.int64))
        up_ids = self.ids_by_dim.get(degree + 1, np.zeros(0, dtype=np.int64))
        size = len(q_ids)
        inside = mask[q_ids] if size else np.zeros(0, dtype=bool)
        inside_up = mask[up_ids] if len(up_ids) else np.zeros(0, dtype=bool)

        down = self.boundary_matrix(degree)[:, inside]
        local_kernel = kernel_basis(F2Matrix.from_dense(down.reshape(down.shape[0], int(inside.sum()))))
        cycles = np.zeros((size, local_kernel.cols), dtype=np.uint8)
        cycles[inside] = local_kernel.to_dense()

        up = self.boundary_matrix(degree + 1)[:, inside_up].reshape(size, int(inside_up.sum()))
        boundaries = column_space_basis(F2Matrix.from_dense(up))

        reps: List[np.ndarray] = []
        current = boundaries.to_dense()
        current_rank = boundaries.cols
        for j in range(cycles.shape[1]):
            candidate = np.hstack([current, cycles[:, j:j + 1]])
            candidate_rank = rank(F2Matrix.from_dense(candidate))
            if candidate_rank > current_rank:
                reps.append(cycles[:, j])
                current = candidate
                current_rank = candidate_rank
        return HomologyBasis(boundaries, F2Matrix.from_columns(reps, size))

    def induced_map(self, source: HomologyBasis, target: HomologyBasis) -> F2Matrix:
        """Matrix of the map induced by an inclusion of subcomplexes."""
        columns = [target.coordinates(z) for z in source.cycles.columns()]
        return F2Matrix.from_columns(columns, target.dim)
