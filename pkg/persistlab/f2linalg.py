"""
Bit-packed linear algebra over the two-element field.

Rows are packed little-endian into 64-bit words, so row operations are XORs of
word arrays. Vectors are plain ``uint8`` numpy arrays of zeros and ones.
"""

from typing import List, Optional, Sequence, Tuple

import numpy as np

from persistlab.constants import WORD_BITS
from persistlab.exceptions import DimensionMismatchError

_WORD = np.dtype("<u8")


def _words(cols: int) -> int:
    return (cols + WORD_BITS - 1) // WORD_BITS


def _pack(dense: np.ndarray) -> np.ndarray:
    rows, cols = dense.shape
    padded = np.zeros((rows, _words(cols) * WORD_BITS), dtype=np.uint8)
    padded[:, :cols] = dense
    packed = np.packbits(padded, axis=1, bitorder="little")
    return np.ascontiguousarray(packed).view(_WORD)


def _unpack(data: np.ndarray, cols: int) -> np.ndarray:
    as_bytes = np.ascontiguousarray(data).view(np.uint8)
    bits = np.unpackbits(as_bytes, axis=1, bitorder="little")
    return bits[:, :cols].astype(np.uint8)


def as_vector(values: Sequence[int]) -> np.ndarray:
    """Coerce a sequence of integers into an F2 column vector."""
    return (np.asarray(values, dtype=np.int64).reshape(-1) % 2).astype(np.uint8)


class F2Matrix:
    """Immutable matrix over F2 stored as packed rows."""

    __slots__ = ("rows", "cols", "data", "_dense")

    def __init__(self, rows: int, cols: int, data: np.ndarray):
        if data.shape != (rows, _words(cols)):
            raise DimensionMismatchError(
                f"packed data has shape {data.shape}, expected {(rows, _words(cols))}"
            )
        self.rows = rows
        self.cols = cols
        self.data = data
        self.data.flags.writeable = False
        self._dense = None

    # ------------------------------------------------------------------ builders

    @classmethod
    def from_dense(cls, dense) -> "F2Matrix":
        arr = np.asarray(dense, dtype=np.int64)
        if arr.ndim != 2:
            raise DimensionMismatchError(f"expected a 2-d array, got {arr.ndim} dims")
        arr = (arr % 2).astype(np.uint8)
        return cls(arr.shape[0], arr.shape[1], _pack(arr))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "F2Matrix":
        return cls(rows, cols, np.zeros((rows, _words(cols)), dtype=_WORD))

    @classmethod
    def identity(cls, size: int) -> "F2Matrix":
        return cls.from_dense(np.eye(size, dtype=np.uint8))

    @classmethod
    def from_columns(cls, columns: Sequence[np.ndarray], rows: int) -> "F2Matrix":
        if not columns:
            return cls.zeros(rows, 0)
        dense = np.stack([as_vector(c) for c in columns], axis=1)
        if dense.shape[0] != rows:
            raise DimensionMismatchError(f"columns have length {dense.shape[0]}, expected {rows}")
        return cls.from_dense(dense)

    # ------------------------------------------------------------------ views

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.rows, self.cols)

    def to_dense(self) -> np.ndarray:
        """Entries as a read-only uint8 array."""
        if self._dense is None:
            dense = _unpack(self.data, self.cols)
            dense.flags.writeable = False
            self._dense = dense
        return self._dense

    def column(self, j: int) -> np.ndarray:
        return self.to_dense()[:, j]

    def columns(self) -> List[np.ndarray]:
        dense = self.to_dense()
        return [dense[:, j] for j in range(self.cols)]

    def is_zero(self) -> bool:
        return not self.data.any()

    def transpose(self) -> "F2Matrix":
        return F2Matrix.from_dense(self.to_dense().T)

    @property
    def T(self) -> "F2Matrix":
        return self.transpose()

    def select_columns(self, indices: Sequence[int]) -> "F2Matrix":
        return F2Matrix.from_dense(self.to_dense()[:, list(indices)].reshape(self.rows, len(indices)))

    # ------------------------------------------------------------------ arithmetic

    def __matmul__(self, other):
        if isinstance(other, F2Matrix):
            if self.cols != other.rows:
                raise DimensionMismatchError(f"cannot multiply {self.shape} by {other.shape}")
            left = self.to_dense().astype(bool)
            out = np.zeros((self.rows, other.data.shape[1]), dtype=_WORD)
            for i in range(self.rows):
                out[i] = np.bitwise_xor.reduce(other.data[left[i]], axis=0)
            return F2Matrix(self.rows, other.cols, out)
        vec = as_vector(other)
        if vec.shape[0] != self.cols:
            raise DimensionMismatchError(f"cannot apply {self.shape} to a vector of length {vec.shape[0]}")
        return ((self.to_dense().astype(np.int64) @ vec) % 2).astype(np.uint8)

    def __add__(self, other: "F2Matrix") -> "F2Matrix":
        if self.shape != other.shape:
            raise DimensionMismatchError(f"cannot add {self.shape} and {other.shape}")
        return F2Matrix(self.rows, self.cols, self.data ^ other.data)

    def __eq__(self, other) -> bool:
        if not isinstance(other, F2Matrix):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self.data, other.data))

    __hash__ = None

    def __repr__(self) -> str:
        return f"F2Matrix({self.rows}x{self.cols}, {self.to_dense().tolist()})"


def hstack(blocks: Sequence[F2Matrix], rows: Optional[int] = None) -> F2Matrix:
    if not blocks:
        return F2Matrix.zeros(rows or 0, 0)
    heights = {b.rows for b in blocks}
    if len(heights) != 1:
        raise DimensionMismatchError(f"hstack of blocks with heights {sorted(heights)}")
    return F2Matrix.from_dense(np.hstack([b.to_dense() for b in blocks]))


def vstack(blocks: Sequence[F2Matrix], cols: Optional[int] = None) -> F2Matrix:
    if not blocks:
        return F2Matrix.zeros(0, cols or 0)
    widths = {b.cols for b in blocks}
    if len(widths) != 1:
        raise DimensionMismatchError(f"vstack of blocks with widths {sorted(widths)}")
    return F2Matrix.from_dense(np.vstack([b.to_dense() for b in blocks]))


def block_diagonal(blocks: Sequence[F2Matrix]) -> F2Matrix:
    rows = sum(b.rows for b in blocks)
    cols = sum(b.cols for b in blocks)
    dense = np.zeros((rows, cols), dtype=np.uint8)
    r = c = 0
    for b in blocks:
        dense[r:r + b.rows, c:c + b.cols] = b.to_dense()
        r += b.rows
        c += b.cols
    return F2Matrix.from_dense(dense)


def row_reduce(A: F2Matrix) -> Tuple[np.ndarray, List[int]]:
    """
    Reduced row echelon form of ``A``.

    Returns the packed reduced rows and the list of pivot columns; the first
    ``len(pivots)`` rows are the nonzero ones.
    """
    m = A.data.copy()
    pivots: List[int] = []
    r = 0
    for c in range(A.cols):
        if r == A.rows:
            break
        w, b = divmod(c, WORD_BITS)
        bit = np.uint64(1) << np.uint64(b)
        hits = np.nonzero(m[r:, w] & bit)[0]
        if hits.size == 0:
            continue
        p = r + int(hits[0])
        if p != r:
            m[[r, p]] = m[[p, r]]
        mask = (m[:, w] & bit) != 0
        mask[r] = False
        m[mask] ^= m[r]
        pivots.append(c)
        r += 1
    return m, pivots


def rank(A: F2Matrix) -> int:
    """F2 rank of ``A``."""
    return len(row_reduce(A)[1])


def solve(A: F2Matrix, b) -> Optional[np.ndarray]:
    """
    Solve ``A x = b``.

    Returns one solution (free variables set to zero) or ``None`` when the
    system is inconsistent.
    """
    vec = as_vector(b)
    if vec.shape[0] != A.rows:
        raise DimensionMismatchError(f"right-hand side has length {vec.shape[0]}, expected {A.rows}")
    augmented = F2Matrix.from_dense(np.hstack([A.to_dense(), vec.reshape(-1, 1)]))
    reduced, pivots = row_reduce(augmented)
    if pivots and pivots[-1] == A.cols:
        return None
    dense = _unpack(reduced, A.cols + 1)
    x = np.zeros(A.cols, dtype=np.uint8)
    for i, p in enumerate(pivots):
        x[p] = dense[i, A.cols]
    return x


def kernel_basis(A: F2Matrix) -> F2Matrix:
    """Matrix whose columns form a basis of ker A."""
    reduced, pivots = row_reduce(A)
    dense = _unpack(reduced, A.cols)
    pivot_set = set(pivots)
    free = [c for c in range(A.cols) if c not in pivot_set]
    basis = np.zeros((A.cols, len(free)), dtype=np.uint8)
    for k, f in enumerate(free):
        basis[f, k] = 1
        for i, p in enumerate(pivots):
            basis[p, k] = dense[i, f]
    return F2Matrix.from_dense(basis)


def column_space_basis(A: F2Matrix) -> F2Matrix:
    """Columns of ``A`` at its pivot positions: a basis of im A."""
    _, pivots = row_reduce(A)
    return A.select_columns(pivots)


def inverse(A: F2Matrix) -> Optional[F2Matrix]:
    """Inverse of a square matrix, or ``None`` when it is singular."""
    if A.rows != A.cols:
        return None
    n = A.rows
    augmented = F2Matrix.from_dense(np.hstack([A.to_dense(), np.eye(n, dtype=np.uint8)]))
    reduced, pivots = row_reduce(augmented)
    if pivots[:n] != list(range(n)):
        return None
    dense = _unpack(reduced, 2 * n)
    return F2Matrix.from_dense(dense[:, n:])


def in_span(A: F2Matrix, b) -> bool:
    return solve(A, b) is not None
