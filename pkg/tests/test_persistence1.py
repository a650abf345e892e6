import numpy as np
import pytest

from persistlab.exceptions import DimensionMismatchError, InvalidParametersError
from persistlab.filtration import (
    PointCloud,
    SimplicialComplex,
    complex_from_simplices,
    rips_filtration,
    validate_monotone,
)
from persistlab.persistence1 import (
    AnModule,
    Bar,
    Barcode,
    an_module_of_barcode,
    barcode,
    barcode_of_an_module,
    homology_an_module,
    rank_function,
    reduce,
    regrade,
)
from tests.factories import PointCloudFactory, random_filtration

FILLED_TRIANGLE = complex_from_simplices([(0, 1, 2)])
HOLLOW_TRIANGLE = complex_from_simplices([(0, 1), (0, 2), (1, 2)])


def test_filled_triangle_barcodes():
    values = [0, 0, 0, 1, 2, 3, 4]
    pairs = reduce(validate_monotone(values, FILLED_TRIANGLE))
    assert barcode(pairs, 0) == Barcode(1, (Bar(0.0, None), Bar(0.0, 1.0), Bar(0.0, 2.0)))
    assert barcode(pairs, 1) == Barcode(1, (Bar(3.0, 4.0),))


def test_filled_triangle_with_tied_edges():
    pairs = reduce(validate_monotone([0, 0, 0, 1, 1, 1, 2], FILLED_TRIANGLE))
    assert barcode(pairs, 0) == Barcode(1, (Bar(0.0, None), Bar(0.0, 1.0), Bar(0.0, 1.0)))
    assert barcode(pairs, 1) == Barcode(1, (Bar(1.0, 2.0),))
    (h1,) = pairs.of_degree(1)
    assert FILLED_TRIANGLE.simplices[h1.birth] == (1, 2)


def test_empty_complex_has_no_pairs():
    empty = validate_monotone(np.zeros((0, 1)), SimplicialComplex(()))
    assert len(reduce(empty)) == 0


def test_cycle_without_filling():
    pairs = reduce(validate_monotone([0, 0, 0, 1, 1, 1], HOLLOW_TRIANGLE))
    assert barcode(pairs, 1) == Barcode(1, (Bar(1.0, None),))


def test_pairs_carry_birth_and_death_simplices():
    filtration = validate_monotone([0, 0, 0, 1, 2, 3, 4], FILLED_TRIANGLE)
    pairs = reduce(filtration)
    (h1,) = pairs.of_degree(1)
    assert FILLED_TRIANGLE.simplices[h1.birth] == (1, 2)
    assert FILLED_TRIANGLE.simplices[h1.death] == (0, 1, 2)


def test_rips_degree_zero_has_one_bar_per_point():
    cloud = PointCloudFactory(r=8)
    bars = barcode(reduce(rips_filtration(cloud, 1), max_degree=0), 0)
    assert len(bars) == 8
    assert bars.infinite_count() == 1
    assert all(bar.birth == (0.0,) for bar in bars)


def test_an_module_example():
    maps = [np.zeros((dst, src)) for src, dst in zip((0, 3, 1, 1, 2, 1, 0, 0, 0), (3, 1, 1, 2, 1, 0, 0, 0, 0))]
    maps[4] = np.array([[1, 0]])
    M = AnModule.from_dense((0, 3, 1, 1, 2, 1, 0, 0, 0, 0), maps)
    expected = [Bar(4, 6), Bar(4, 5), Bar(3, 4), Bar(2, 3)] + [Bar(1, 2)] * 3
    assert barcode_of_an_module(M) == Barcode(1, tuple(expected))


def test_an_module_shape_checks():
    with pytest.raises(DimensionMismatchError):
        AnModule.from_dense((1, 2), [])


def test_rank_function_is_recovered_from_barcode():
    rng = np.random.default_rng(3)
    for _ in range(25):
        dims = tuple(int(d) for d in rng.integers(0, 4, size=6))
        maps = [rng.integers(0, 2, size=(dims[i + 1], dims[i])) for i in range(5)]
        M = AnModule.from_dense(dims, maps)
        rebuilt = an_module_of_barcode(barcode_of_an_module(M), M.k)
        assert rebuilt.dims == M.dims
        assert np.array_equal(rank_function(rebuilt), rank_function(M))


def test_an_module_of_barcode_rejects_out_of_range():
    with pytest.raises(InvalidParametersError):
        an_module_of_barcode(Barcode(1, (Bar(0, 5),)), 3)


def test_reduction_agrees_with_homology_oracle():
    """A redução coincide com a decomposição do módulo de homologia."""
    rng = np.random.default_rng(4)
    for _ in range(20):
        filtration = random_filtration(rng, integer=True)
        pairs = reduce(filtration)
        for degree in (0, 1):
            module, levels = homology_an_module(filtration, degree)
            assert barcode(pairs, degree) == regrade(barcode_of_an_module(module), levels)


def test_bar_validation():
    with pytest.raises(InvalidParametersError):
        Bar(2.0, 1.0)
    with pytest.raises(InvalidParametersError):
        Bar(1.0, 1.0)
    with pytest.raises(InvalidParametersError):
        Bar(0.0, 1.0, sign=0)
    assert str(Bar(0.0, None)) == "[0, inf)"
    assert Bar((0.0, 0.0), (3.0, 1.0)).lift_block() == (0.0, 0.0, 3.0, 1.0, 1.0)


def test_two_point_cloud():
    bars = barcode(reduce(rips_filtration(PointCloud([[0.0, 0.0], [2.0, 0.0]]))), 0)
    assert bars == Barcode(1, (Bar(0.0, None), Bar(0.0, 2.0)))
