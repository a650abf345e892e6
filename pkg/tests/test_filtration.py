import numpy as np
import pytest

from persistlab.exceptions import InvalidParametersError, MonotonicityViolation, StratumBoundary
from persistlab.filtration import (
    PointCloud,
    SimplicialComplex,
    complex_from_simplices,
    full_complex,
    rips_filtration,
    rips_partial,
    scale_cloud,
    simplex_order,
    stratum_signature,
    validate_monotone,
)
from tests.factories import PointCloudFactory

EDGE = complex_from_simplices([(0, 1)])
TRIANGLE_CLOUD = PointCloud([[0.0, 0.0], [3.0, 0.0], [0.0, 4.0]])


def test_complex_is_closed_and_ordered():
    assert EDGE.simplices == ((0,), (1,), (0, 1))
    with pytest.raises(InvalidParametersError):
        SimplicialComplex(((0,), (0, 1)))
    with pytest.raises(InvalidParametersError):
        SimplicialComplex(((0, 1), (0,), (1,)))


def test_full_complex_counts():
    assert len(full_complex(4, 2)) == 4 + 6 + 4


def test_validate_monotone_examples():
    validate_monotone([0.0, 0.0, 1.0], EDGE)
    with pytest.raises(MonotonicityViolation) as exc:
        validate_monotone([1.0, 0.0, 0.0], EDGE)
    assert exc.value.sigma == (0,)
    assert exc.value.tau == (0, 1)


def test_validate_monotone_reports_component():
    values = [[0.0, 1.0], [0.0, 0.0], [1.0, 0.0]]
    with pytest.raises(MonotonicityViolation) as exc:
        validate_monotone(values, EDGE)
    assert exc.value.component == 1


def test_rips_examples():
    single = rips_filtration(PointCloud([[1.0, 2.0]]))
    assert single.values.tolist() == [[0.0]]

    pair = rips_filtration(PointCloud([[0.0, 0.0], [2.0, 0.0]]))
    assert pair.values[:, 0].tolist() == [0.0, 0.0, 2.0]

    tri = rips_filtration(TRIANGLE_CLOUD)
    assert tri.values[:, 0].tolist() == [0.0, 0.0, 0.0, 3.0, 4.0, 5.0, 5.0]


def test_rips_passes_validation():
    cloud = PointCloudFactory(r=7)
    filtration = rips_filtration(cloud)
    validate_monotone(filtration.values, filtration.complex)


def test_rips_scales_linearly():
    cloud = PointCloudFactory(r=5)
    base = rips_filtration(cloud).values
    scaled = rips_filtration(scale_cloud(cloud, 2.5)).values
    assert np.allclose(scaled, 2.5 * base)


def test_rips_partial_examples():
    cloud = PointCloud([[0.0, 0.0], [3.0, 0.0]])
    assert np.allclose(rips_partial(cloud, (0, 1), 0), [-1.0, 0.0])
    assert np.allclose(rips_partial(TRIANGLE_CLOUD, (0, 1, 2), 0), [0.0, 0.0])
    with pytest.raises(StratumBoundary):
        rips_partial(PointCloud([[0.0, 0.0], [0.0, 0.0]]), (0, 1), 0)


def test_stratum_signature_examples():
    assert stratum_signature(TRIANGLE_CLOUD).order == ((0, 1), (0, 2), (1, 2))
    assert not stratum_signature(TRIANGLE_CLOUD).boundary
    square = PointCloud([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    assert stratum_signature(square).boundary
    assert stratum_signature(PointCloud([[0.0, 0.0]])).order == ()


def test_simplex_order_examples():
    assert simplex_order(validate_monotone([0.0, 0.0, 2.0], EDGE)).tolist() == [0, 1, 2]
    assert simplex_order(validate_monotone([0.0, 0.0, 0.0], EDGE)).tolist() == [0, 1, 2]
    path = complex_from_simplices([(0, 1), (1, 2)])
    ordered = simplex_order(validate_monotone([0.0, 0.0, 0.0, 1.0, 1.0], path))
    assert ordered.tolist() == [0, 1, 2, 3, 4]


def test_simplex_order_needs_one_parameter():
    filtration = validate_monotone([[0.0, 0.0], [0.0, 0.0], [1.0, 1.0]], EDGE)
    with pytest.raises(InvalidParametersError):
        simplex_order(filtration)
