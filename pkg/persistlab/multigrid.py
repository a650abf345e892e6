"""
Persistence modules on finite grids and their minimal resolutions relative to
hook modules, from which signed barcodes are read.

A morphism from a sum of hook modules to a module X is stored by its
generators: one element of X(p) per summand ``[p, q)``. A differential
between two hook sums is an F2Matrix whose column j is the generator image of
summand j, written in the coordinates of all summands of the target term.
"""

from collections import Counter
from dataclasses import dataclass, field
from itertools import product
import logging
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from persistlab.chains import ChainComplex
from persistlab.constants import (
    ENDOMORPHISM_ENUMERATION_DIM,
    ENDOMORPHISM_SAMPLES,
    ENDOMORPHISM_SEED,
    INDECOMPOSABLE_CAP,
    MAX_PARAMETERS,
)
from persistlab.exceptions import (
    CapExceeded,
    CommutativityViolation,
    DimensionMismatchError,
    InvalidParametersError,
    ResolutionTooLong,
)
from persistlab.f2linalg import (
    F2Matrix,
    block_diagonal,
    inverse,
    kernel_basis,
    rank,
    solve,
)
from persistlab.filtration import MonotoneFiltration, sublevel_mask
from persistlab.persistence1 import Bar, sort_bars

logger = logging.getLogger(__name__)

Cell = Tuple[int, ...]


def leq(s: Sequence[int], t: Sequence[int]) -> bool:
    return all(a <= b for a, b in zip(s, t))


# =============================================================================
# Grids and modules
# =============================================================================


@dataclass(frozen=True)
class Grid:
    sizes: Tuple[int, ...]
    coords: Optional[Tuple[Tuple[float, ...], ...]] = None

    def __post_init__(self):
        sizes = tuple(int(g) for g in self.sizes)
        if not sizes or any(g < 1 for g in sizes):
            raise InvalidParametersError(f"grid sizes must be positive, got {sizes}")
        coords = self.coords
        if coords is not None:
            coords = tuple(tuple(float(c) for c in axis) for axis in coords)
            if tuple(len(axis) for axis in coords) != sizes:
                raise DimensionMismatchError("grid coordinates do not match the grid sizes")
            if any(np.any(np.diff(axis) <= 0) for axis in coords):
                raise InvalidParametersError("grid coordinates must be strictly increasing")
        object.__setattr__(self, "sizes", sizes)
        object.__setattr__(self, "coords", coords)

    @property
    def n(self) -> int:
        return len(self.sizes)

    def cells(self) -> Iterator[Cell]:
        return product(*(range(g) for g in self.sizes))

    def contains(self, cell: Sequence[int]) -> bool:
        return len(cell) == self.n and all(0 <= c < g for c, g in zip(cell, self.sizes))

    def step(self, cell: Cell, axis: int) -> Optional[Cell]:
        nxt = cell[:axis] + (cell[axis] + 1,) + cell[axis + 1:]
        return nxt if nxt[axis] < self.sizes[axis] else None

    def real(self, cell: Sequence[int]) -> Tuple[float, ...]:
        if self.coords is None:
            return tuple(float(c) for c in cell)
        return tuple(self.coords[i][c] for i, c in enumerate(cell))


@dataclass(frozen=True, eq=False)
class GridModule:
    grid: Grid
    dims: np.ndarray
    arrows: Dict[Tuple[Cell, int], F2Matrix] = field(default_factory=dict)
    _maps: Dict[Tuple[Cell, Cell], F2Matrix] = field(default_factory=dict, init=False, repr=False)

    def __post_init__(self):
        dims = np.array(self.dims, dtype=np.int64).reshape(self.grid.sizes)
        if np.any(dims < 0):
            raise InvalidParametersError("dimensions must be nonnegative")
        dims.flags.writeable = False
        object.__setattr__(self, "dims", dims)
        arrows = {}
        for (cell, axis), matrix in self.arrows.items():
            cell = tuple(int(c) for c in cell)
            target = self.grid.step(cell, axis) if self.grid.contains(cell) and 0 <= axis < self.grid.n else None
            if target is None:
                raise InvalidParametersError(f"no arrow leaves cell {cell} along axis {axis}")
            expected = (int(dims[target]), int(dims[cell]))
            if matrix.shape != expected:
                raise DimensionMismatchError(
                    f"arrow at {cell} along axis {axis} has shape {matrix.shape}, expected {expected}"
                )
            arrows[(cell, axis)] = matrix
        object.__setattr__(self, "arrows", arrows)

    def dim(self, cell: Sequence[int]) -> int:
        return int(self.dims[tuple(cell)])

    def total_dim(self) -> int:
        return int(self.dims.sum())

    def arrow(self, cell: Cell, axis: int) -> F2Matrix:
        found = self.arrows.get((cell, axis))
        if found is not None:
            return found
        target = self.grid.step(cell, axis)
        return F2Matrix.zeros(self.dim(target), self.dim(cell))

    def map_between(self, s: Sequence[int], t: Sequence[int]) -> F2Matrix:
        """Structure map M(s <= t), composed along axis 0 first."""
        s, t = tuple(s), tuple(t)
        key = (s, t)
        if key not in self._maps:
            if not leq(s, t):
                raise InvalidParametersError(f"{s} is not below {t}")
            composite = F2Matrix.identity(self.dim(s))
            cell = s
            for axis in range(self.grid.n):
                while cell[axis] < t[axis]:
                    composite = self.arrow(cell, axis) @ composite
                    cell = self.grid.step(cell, axis)
            self._maps[key] = composite
        return self._maps[key]

    def validate(self) -> "GridModule":
        """Raise ``CommutativityViolation`` at the first square that does not commute."""
        for cell in self.grid.cells():
            for i in range(self.grid.n):
                for j in range(i + 1, self.grid.n):
                    ci = self.grid.step(cell, i)
                    cj = self.grid.step(cell, j)
                    if ci is None or cj is None:
                        continue
                    first = self.arrow(ci, j) @ self.arrow(cell, i)
                    second = self.arrow(cj, i) @ self.arrow(cell, j)
                    if first != second:
                        raise CommutativityViolation(cell, (i, j))
        return self


def direct_sum(M: GridModule, N: GridModule) -> GridModule:
    if M.grid.sizes != N.grid.sizes:
        raise DimensionMismatchError("direct sum of modules on different grids")
    arrows = {}
    for cell in M.grid.cells():
        for axis in range(M.grid.n):
            if M.grid.step(cell, axis) is not None:
                arrows[(cell, axis)] = block_diagonal([M.arrow(cell, axis), N.arrow(cell, axis)])
    return GridModule(M.grid, M.dims + N.dims, arrows)


def zero_module(grid: Grid) -> GridModule:
    return GridModule(grid, np.zeros(grid.sizes, dtype=np.int64))


# =============================================================================
# Hooks
# =============================================================================


@dataclass(frozen=True)
class HookInterval:
    """``[p, inf) \\ [q, inf)`` on a grid; ``q=None`` is the principal upset at ``p``."""

    p: Cell
    q: Optional[Cell] = None

    def __post_init__(self):
        p = tuple(int(c) for c in self.p)
        q = None if self.q is None else tuple(int(c) for c in self.q)
        if q is not None and (len(q) != len(p) or not leq(p, q) or p == q):
            raise InvalidParametersError(f"hook needs p < q, got p={p}, q={q}")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)

    @property
    def is_upset(self) -> bool:
        return self.q is None

    def contains(self, t: Sequence[int]) -> bool:
        return leq(self.p, t) and not (self.q is not None and leq(self.q, t))

    def sort_key(self):
        return (self.p, (1,) if self.q is None else (0,) + self.q)

    def to_bar(self, grid: Grid, sign: int = 1) -> Bar:
        death = None if self.q is None else grid.real(self.q)
        return Bar(grid.real(self.p), death, sign)


def hom_nonzero(source: HookInterval, target: HookInterval) -> bool:
    """Whether Hom(k_source, k_target) is nonzero (it is then one-dimensional)."""
    if not target.contains(source.p):
        return False
    if source.q is None:
        return True
    return target.q is not None and leq(target.q, source.q)


def enumerate_hooks(grid: Grid, family: str = "hooks") -> List[HookInterval]:
    if family not in ("hooks", "upsets"):
        raise InvalidParametersError(f"unknown interval family {family!r}")
    cells = list(grid.cells())
    hooks = [HookInterval(p) for p in cells]
    if family == "hooks":
        hooks.extend(HookInterval(p, q) for p in cells for q in cells if p != q and leq(p, q))
    return sorted(hooks, key=HookInterval.sort_key)


def hom_space(I: HookInterval, M: GridModule) -> F2Matrix:
    """Basis (as columns of M(p)) of Hom(k_I, M) = ker M(p <= q), or all of M(p) for an upset."""
    if not M.grid.contains(I.p) or (I.q is not None and not M.grid.contains(I.q)):
        raise InvalidParametersError(f"hook {I} is not on the module's grid")
    if I.q is None:
        return F2Matrix.identity(M.dim(I.p))
    return kernel_basis(M.map_between(I.p, I.q))


def hook_module(I: HookInterval, grid: Grid) -> GridModule:
    """The interval module k_I."""
    dims = np.zeros(grid.sizes, dtype=np.int64)
    for cell in grid.cells():
        if I.contains(cell):
            dims[cell] = 1
    arrows = {}
    for cell in grid.cells():
        for axis in range(grid.n):
            target = grid.step(cell, axis)
            if target is not None and I.contains(cell) and I.contains(target):
                arrows[(cell, axis)] = F2Matrix.identity(1)
    return GridModule(grid, dims, arrows)


def interval_sum_module(hooks: Sequence[HookInterval], grid: Grid) -> GridModule:
    module = zero_module(grid)
    for I in hooks:
        module = direct_sum(module, hook_module(I, grid))
    return module


# =============================================================================
# Relative resolutions
# =============================================================================


@dataclass(frozen=True, eq=False)
class Summand:
    hook: HookInterval
    generator: np.ndarray


def _active(term: Sequence[HookInterval], t: Cell) -> List[int]:
    return [j for j, I in enumerate(term) if I.contains(t)]


class _CoverSearch:
    """Generator images pushed along structure maps, cached per (summand, cell)."""

    def __init__(self, X: GridModule, summands: Sequence[Summand]):
        self.X = X
        self.summands = list(summands)
        self._pushed: Dict[Tuple[int, Cell], np.ndarray] = {}

    def push(self, j: int, t: Cell) -> np.ndarray:
        key = (j, t)
        if key not in self._pushed:
            s = self.summands[j]
            self._pushed[key] = self.X.map_between(s.hook.p, t) @ s.generator
        return self._pushed[key]

    def is_generated(self, k: int, alive: Sequence[bool]) -> bool:
        """Whether summand k factors through the other live summands."""
        target = self.summands[k]
        p = target.hook.p
        images = [
            self.push(j, p)
            for j, s in enumerate(self.summands)
            if alive[j] and j != k and hom_nonzero(target.hook, s.hook)
        ]
        if not images:
            return False
        return solve(F2Matrix.from_columns(images, self.X.dim(p)), target.generator) is not None


def relative_cover(X: GridModule, hooks: Sequence[HookInterval]) -> List[Summand]:
    """
    Minimal right approximation of X by sums of the given interval modules.

    Starts from every hook with a basis of its Hom space and drops, in hook
    order, each summand whose generator is already reached from the others.
    """
    candidates = []
    for I in hooks:
        basis = hom_space(I, X)
        candidates.extend(Summand(I, col) for col in basis.columns())
    search = _CoverSearch(X, candidates)
    alive = [True] * len(candidates)
    for k in range(len(candidates)):
        if search.is_generated(k, alive):
            alive[k] = False
    return [c for j, c in enumerate(candidates) if alive[j]]


def is_minimal_cover(X: GridModule, summands: Sequence[Summand]) -> bool:
    """No single summand can be dropped without losing surjectivity on its own hook."""
    search = _CoverSearch(X, summands)
    alive = [True] * len(summands)
    return not any(search.is_generated(k, alive) for k in range(len(summands)))


def _evaluation(X: GridModule, summands: Sequence[Summand], t: Cell) -> Tuple[List[int], F2Matrix]:
    active = [j for j, s in enumerate(summands) if s.hook.contains(t)]
    columns = [X.map_between(summands[j].hook.p, t) @ summands[j].generator for j in active]
    return active, F2Matrix.from_columns(columns, X.dim(t))


def _projection(source: List[int], target: List[int]) -> F2Matrix:
    where = {j: k for k, j in enumerate(target)}
    dense = np.zeros((len(target), len(source)), dtype=np.uint8)
    for k, j in enumerate(source):
        if j in where:
            dense[where[j], k] = 1
    return F2Matrix.from_dense(dense)


def kernel_module(X: GridModule, summands: Sequence[Summand]) -> Tuple[GridModule, Dict[Cell, F2Matrix]]:
    """
    Kernel of the evaluation map from the hook sum onto X, with, per cell, the
    basis of the kernel in the coordinates of the summands active there.
    """
    grid = X.grid
    active: Dict[Cell, List[int]] = {}
    bases: Dict[Cell, F2Matrix] = {}
    dims = np.zeros(grid.sizes, dtype=np.int64)
    for t in grid.cells():
        active[t], evaluation = _evaluation(X, summands, t)
        bases[t] = kernel_basis(evaluation)
        dims[t] = bases[t].cols
    arrows = {}
    for t in grid.cells():
        for axis in range(grid.n):
            u = grid.step(t, axis)
            if u is None or dims[t] == 0 or dims[u] == 0:
                continue
            pushed = _projection(active[t], active[u]) @ bases[t]
            columns = [solve(bases[u], col) for col in pushed.columns()]
            arrows[(t, axis)] = F2Matrix.from_columns(columns, int(dims[u]))
    return GridModule(grid, dims, arrows), bases


@dataclass(frozen=True, eq=False)
class HookResolution:
    """
    ``terms[i]`` lists the summands of the i-th hook sum. ``differentials[i]``
    is the map from ``terms[i + 1]`` to ``terms[i]``; ``augmentation`` holds
    the generators in M of the summands of ``terms[0]``.
    """

    grid: Grid
    family: str
    terms: Tuple[Tuple[HookInterval, ...], ...]
    differentials: Tuple[F2Matrix, ...]
    augmentation: Tuple[np.ndarray, ...]
    minimal: bool = True

    @property
    def length(self) -> int:
        return max(len(self.terms) - 1, 0)

    def active(self, degree: int, t: Cell) -> List[int]:
        return _active(self.terms[degree], t)

    def differential_at(self, degree: int, t: Cell) -> F2Matrix:
        """Map from term ``degree`` to term ``degree - 1`` at cell ``t``."""
        rows = self.active(degree - 1, t)
        cols = self.active(degree, t)
        dense = self.differentials[degree - 1].to_dense()
        return F2Matrix.from_dense(dense[np.ix_(rows, cols)].reshape(len(rows), len(cols)))

    def augmentation_at(self, M: GridModule, t: Cell) -> F2Matrix:
        cols = self.active(0, t) if self.terms else []
        columns = [M.map_between(self.terms[0][j].p, t) @ self.augmentation[j] for j in cols]
        return F2Matrix.from_columns(columns, M.dim(t))

    def multiset(self, degree: int) -> Counter:
        return Counter(self.terms[degree]) if degree < len(self.terms) else Counter()


def global_dimension_bound(n: int, family: str) -> int:
    return 2 * n - 2 if family == "hooks" else n


def minimal_hook_resolution(M: GridModule, family: str = "hooks") -> HookResolution:
    """
    Minimal resolution of M relative to hooks (or, with ``family="upsets"``,
    relative to principal upsets, i.e. its minimal free resolution).

    Alternates relative covers and kernels until the kernel vanishes.
    """
    n = M.grid.n
    if n > MAX_PARAMETERS:
        raise InvalidParametersError(f"resolutions are implemented for n <= {MAX_PARAMETERS}, got n={n}")
    M.validate()
    bound = global_dimension_bound(n, family)
    hooks = enumerate_hooks(M.grid, family)

    terms: List[Tuple[HookInterval, ...]] = []
    differentials: List[F2Matrix] = []
    augmentation: Tuple[np.ndarray, ...] = ()
    minimal = True
    X = M
    previous: Optional[List[Summand]] = None
    embed: Dict[Cell, F2Matrix] = {}
    while X.total_dim() > 0:
        if len(terms) > bound:
            raise ResolutionTooLong(
                f"resolution relative to {family} exceeds length {bound} on a {n}-parameter grid"
            )
        summands = relative_cover(X, hooks)
        minimal = minimal and is_minimal_cover(X, summands)
        if previous is None:
            augmentation = tuple(s.generator for s in summands)
        else:
            columns = []
            for s in summands:
                full = np.zeros(len(previous), dtype=np.uint8)
                full[_active([o.hook for o in previous], s.hook.p)] = embed[s.hook.p] @ s.generator
                columns.append(full)
            differentials.append(F2Matrix.from_columns(columns, len(previous)))
        terms.append(tuple(s.hook for s in summands))
        logger.debug(f"term {len(terms) - 1}: {len(summands)} summands")
        X, embed = kernel_module(X, summands)
        previous = summands

    logger.info(f"resolution relative to {family}: length {max(len(terms) - 1, 0)}")
    return HookResolution(M.grid, family, tuple(terms), tuple(differentials), augmentation, minimal)


@dataclass(frozen=True)
class ExactnessReport:
    ok: bool
    hook: Optional[HookInterval] = None
    degree: Optional[int] = None
    reason: str = ""


def euler_characteristic(res: HookResolution) -> np.ndarray:
    chi = np.zeros(res.grid.sizes, dtype=np.int64)
    for t in res.grid.cells():
        chi[t] = sum((-1) ** i * len(res.active(i, t)) for i in range(len(res.terms)))
    return chi


def check_relative_exactness(res: HookResolution, M: GridModule) -> ExactnessReport:
    """
    Verify the resolution of M: pointwise Euler characteristic, complexes
    (d o d = 0) and, for every interval I of the resolution's family (hooks
    or upsets), exactness of the sequence obtained by applying Hom(k_I, -).
    ``degree`` is the term where exactness fails, -1 standing for
    surjectivity onto M.
    """
    chi = euler_characteristic(res)
    if not np.array_equal(chi, M.dims):
        bad = tuple(int(c) for c in np.argwhere(chi != M.dims)[0])
        return ExactnessReport(False, HookInterval(bad), None, f"Euler characteristic differs at {bad}")

    L = len(res.terms)
    maps: Dict[Tuple[int, Cell], F2Matrix] = {}
    for t in res.grid.cells():
        if L:
            maps[(0, t)] = res.augmentation_at(M, t)
        for i in range(1, L):
            maps[(i, t)] = res.differential_at(i, t)
        for i in range(1, L):
            if not (maps[(i - 1, t)] @ maps[(i, t)]).is_zero():
                return ExactnessReport(False, HookInterval(t), i, f"d o d is not zero at {t}")

    for I in enumerate_hooks(res.grid, res.family):
        p = I.p
        target_dim = hom_space(I, M).cols
        selected = [
            [k for k, j in enumerate(res.active(i, p)) if hom_nonzero(I, res.terms[i][j])]
            for i in range(L)
        ]
        if L == 0:
            if target_dim:
                return ExactnessReport(False, I, -1, "empty resolution of a nonzero module")
            continue
        onto = maps[(0, p)].select_columns(selected[0])
        if rank(onto) != target_dim:
            return ExactnessReport(False, I, -1, "not surjective on Hom")
        for i in range(L):
            outgoing = maps[(i, p)].select_columns(selected[i])
            kernel_dim = len(selected[i]) - rank(outgoing)
            if i + 1 < L:
                incoming = maps[(i + 1, p)].select_columns(selected[i + 1])
                image_dim = rank(incoming)
            else:
                image_dim = 0
            if kernel_dim != image_dim:
                return ExactnessReport(False, I, i, "Hom sequence is not exact")
    return ExactnessReport(True)


# =============================================================================
# Signed barcodes
# =============================================================================


@dataclass(frozen=True)
class SignedBarcode:
    n: int
    positive: Tuple[Bar, ...] = ()
    negative: Tuple[Bar, ...] = ()

    def __post_init__(self):
        positive = sort_bars(b.with_sign(1) for b in self.positive)
        negative = sort_bars(b.with_sign(-1) for b in self.negative)
        for bar in positive + negative:
            if bar.n != self.n:
                raise DimensionMismatchError(f"bar {bar} does not have {self.n} parameters")
        object.__setattr__(self, "positive", positive)
        object.__setattr__(self, "negative", negative)

    @property
    def bars(self) -> Tuple[Bar, ...]:
        return self.positive + self.negative

    def __len__(self) -> int:
        return len(self.positive) + len(self.negative)


def signed_barcode(M: GridModule, family: str = "hooks") -> SignedBarcode:
    """Even terms of the minimal relative resolution give the positive bars, odd terms the negative ones."""
    res = minimal_hook_resolution(M, family)
    return signed_barcode_of_resolution(res)


def signed_barcode_of_resolution(res: HookResolution) -> SignedBarcode:
    positive, negative = [], []
    for i, term in enumerate(res.terms):
        sign = 1 if i % 2 == 0 else -1
        bars = [I.to_bar(res.grid, sign) for I in term]
        (positive if sign > 0 else negative).extend(bars)
    return SignedBarcode(res.grid.n, tuple(positive), tuple(negative))


def grothendieck_reduce(S: SignedBarcode) -> SignedBarcode:
    """Cancel positive and negative copies of the same interval."""
    pos = Counter((b.birth, b.death) for b in S.positive)
    neg = Counter((b.birth, b.death) for b in S.negative)
    common = pos & neg
    pos -= common
    neg -= common
    return SignedBarcode(
        S.n,
        tuple(Bar(s, t) for (s, t), c in pos.items() for _ in range(c)),
        tuple(Bar(s, t, -1) for (s, t), c in neg.items() for _ in range(c)),
    )


# =============================================================================
# Homology of multifiltrations
# =============================================================================


def grid_levels(filtration: MonotoneFiltration) -> Tuple[Tuple[float, ...], ...]:
    return tuple(tuple(float(v) for v in np.unique(filtration.values[:, i])) for i in range(filtration.n))


def grid_homology_module(
    filtration: MonotoneFiltration,
    levels: Optional[Sequence[Sequence[float]]] = None,
    degree: int = 0,
) -> GridModule:
    """Homology in ``degree`` of the sublevel complexes at every grid cell, with induced maps."""
    if levels is None:
        # an axis without values (empty complex) gets a single level
        levels = tuple(axis or (0.0,) for axis in grid_levels(filtration))
    levels = tuple(tuple(float(v) for v in axis) for axis in levels)
    if len(levels) != filtration.n:
        raise DimensionMismatchError(f"{len(levels)} level axes for an n={filtration.n} filtration")
    for i, axis in enumerate(levels):
        missing = set(filtration.values[:, i].tolist()) - set(axis)
        if missing:
            raise InvalidParametersError(f"levels of axis {i} miss filtration values {sorted(missing)}")
    grid = Grid(tuple(len(axis) for axis in levels), levels)
    chains = ChainComplex(filtration.complex)
    bases = {t: chains.homology(sublevel_mask(filtration, grid.real(t)), degree) for t in grid.cells()}
    dims = np.zeros(grid.sizes, dtype=np.int64)
    arrows = {}
    for t in grid.cells():
        dims[t] = bases[t].dim
        for axis in range(grid.n):
            u = grid.step(t, axis)
            if u is not None:
                arrows[(t, axis)] = chains.induced_map(bases[t], bases[u])
    return GridModule(grid, dims, arrows)


# =============================================================================
# Indecomposability
# =============================================================================


def _endomorphism_solutions(M: GridModule) -> Tuple[np.ndarray, Dict[Cell, int]]:
    """
    Solution space of the commuting constraints phi(u) A = A phi(t), one
    column per basis endomorphism, entries of phi(t) stored row-major at
    ``offset[t]``.
    """
    cells = list(M.grid.cells())
    offset: Dict[Cell, int] = {}
    total = 0
    for t in cells:
        offset[t] = total
        total += M.dim(t) ** 2

    def var(t: Cell, a: int, b: int) -> int:
        return offset[t] + a * M.dim(t) + b

    rows = []
    for t in cells:
        for axis in range(M.grid.n):
            u = M.grid.step(t, axis)
            if u is None:
                continue
            A = M.arrow(t, axis).to_dense()
            du, dt = M.dim(u), M.dim(t)
            for r in range(du):
                for c in range(dt):
                    row = np.zeros(total, dtype=np.uint8)
                    for a in range(du):
                        if A[a, c]:
                            row[var(u, r, a)] ^= 1
                    for b in range(dt):
                        if A[r, b]:
                            row[var(t, b, c)] ^= 1
                    rows.append(row)
    constraints = F2Matrix.from_dense(np.array(rows, dtype=np.uint8).reshape(len(rows), total))
    return kernel_basis(constraints).to_dense(), offset


def _nontrivial_idempotents(M: GridModule, flat: np.ndarray, offset: Dict[Cell, int]) -> np.ndarray:
    """Mask of the rows of ``flat`` (endomorphisms, one per row) that are idempotents other than 0 and 1."""
    identity = np.zeros(flat.shape[1], dtype=np.uint8)
    idempotent = np.ones(flat.shape[0], dtype=bool)
    for t, start in offset.items():
        d = M.dim(t)
        if d == 0:
            continue
        identity[start:start + d * d] = np.eye(d, dtype=np.uint8).reshape(-1)
        phi = flat[:, start:start + d * d].reshape(-1, d, d).astype(np.int64)
        square = np.einsum("kab,kbc->kac", phi, phi) % 2
        idempotent &= np.all(square == phi, axis=(1, 2))
    nonzero = flat.any(axis=1)
    not_identity = np.any(flat != identity, axis=1)
    return idempotent & nonzero & not_identity


def _fitting_splits(M: GridModule, phi: np.ndarray, offset: Dict[Cell, int]) -> bool:
    """A high enough power of phi that is neither nilpotent nor invertible splits M."""
    powers = {}
    for t, start in offset.items():
        d = M.dim(t)
        if d:
            powers[t] = F2Matrix.from_dense(phi[start:start + d * d].reshape(d, d))
    top = max((m.rows for m in powers.values()), default=0)
    reach = 1
    while reach < top:
        powers = {t: m @ m for t, m in powers.items()}
        reach *= 2
    nilpotent = all(m.is_zero() for m in powers.values())
    invertible = all(inverse(m) is not None for m in powers.values())
    return not nilpotent and not invertible


@dataclass(frozen=True)
class IndecomposabilityVerdict:
    indecomposable: bool
    sampled: bool = False
    endomorphism_dim: int = 0


def indecomposability(M: GridModule, cap: int = INDECOMPOSABLE_CAP) -> IndecomposabilityVerdict:
    """
    Whether End(M) has no idempotent besides 0 and 1. The zero module is not
    indecomposable.

    Small endomorphism algebras are enumerated; larger ones are sampled and
    tested with Fitting's lemma, which only ever certifies decomposability,
    so a positive verdict from that branch is marked ``sampled``.
    """
    if M.total_dim() > cap:
        raise CapExceeded(f"total dimension {M.total_dim()} exceeds the cap {cap}")
    if M.total_dim() == 0:
        return IndecomposabilityVerdict(False)
    solutions, offset = _endomorphism_solutions(M)
    dim = solutions.shape[1]
    logger.debug(f"End(M) has dimension {dim}")
    if dim <= ENDOMORPHISM_ENUMERATION_DIM:
        chunk = 4096
        for start in range(0, 2 ** dim, chunk):
            codes = np.arange(start, min(start + chunk, 2 ** dim), dtype=np.int64)
            coefficients = ((codes[:, None] >> np.arange(dim)) & 1).astype(np.int64)
            flat = ((coefficients @ solutions.T.astype(np.int64)) % 2).astype(np.uint8)
            if _nontrivial_idempotents(M, flat, offset).any():
                return IndecomposabilityVerdict(False, endomorphism_dim=dim)
        return IndecomposabilityVerdict(True, endomorphism_dim=dim)
    rng = np.random.default_rng(ENDOMORPHISM_SEED)
    for _ in range(ENDOMORPHISM_SAMPLES):
        coefficients = rng.integers(0, 2, size=dim).astype(np.int64)
        phi = ((solutions.astype(np.int64) @ coefficients) % 2).astype(np.uint8)
        if _fitting_splits(M, phi, offset):
            return IndecomposabilityVerdict(False, sampled=True, endomorphism_dim=dim)
    logger.warning(f"no splitting endomorphism found in {ENDOMORPHISM_SAMPLES} samples of a {dim}-dim End(M)")
    return IndecomposabilityVerdict(True, sampled=True, endomorphism_dim=dim)


def is_indecomposable(M: GridModule, cap: int = INDECOMPOSABLE_CAP) -> bool:
    return indecomposability(M, cap).indecomposable
