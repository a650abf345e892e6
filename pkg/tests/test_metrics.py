import math

import numpy as np
import pytest

from persistlab.constants import SIGNED_STABILITY_HOOKS, SIGNED_STABILITY_UPSETS
from persistlab.exceptions import CapExceeded, DimensionMismatchError
from persistlab.filtration import complex_from_simplices, validate_monotone
from persistlab.metrics import (
    bar_cost,
    bar_deletion_cost,
    bottleneck,
    bottleneck_bruteforce,
    dist1,
    matching_costs,
    signed_bottleneck,
)
from persistlab.multigrid import SignedBarcode, grid_homology_module, signed_barcode
from persistlab.persistence1 import Bar, Barcode, barcode, reduce
from tests.factories import (
    BarcodeFactory,
    SMALL_COMPLEX,
    SignedBarcodeFactory,
    perturb_monotone,
    random_barcode,
    random_monotone_values,
)

LONG = Bar(0.0, 4.0)
PATH = complex_from_simplices([(0, 1), (1, 2)])


def test_cost_examples():
    assert bar_cost(LONG, LONG) == 0.0
    assert bar_deletion_cost(LONG) == 2.0
    assert bar_cost(LONG, Bar(1.0, 4.0)) == 1.0
    assert bar_deletion_cost(Bar((0.0, 0.0), (3.0, 1.0))) == 0.5
    assert bar_deletion_cost(Bar(0.0, None)) == math.inf


def test_cost_conventions():
    assert bar_cost(Bar(0.0, None), Bar(1.0, None)) == 1.0
    assert bar_cost(Bar(0.0, None), Bar(0.0, 1.0)) == math.inf
    assert bar_cost(LONG, LONG.with_sign(-1)) == math.inf
    with pytest.raises(DimensionMismatchError):
        bar_cost(LONG, Bar((0.0, 0.0), (1.0, 1.0)))


def test_bottleneck_examples():
    B = BarcodeFactory()
    value, matching = bottleneck(B, B)
    assert value == 0.0
    assert max(matching_costs(B, B, matching), default=0.0) == 0.0

    assert bottleneck(Barcode(1, (LONG,)), Barcode(1))[0] == 2.0
    assert bottleneck(Barcode(1, (LONG,)), Barcode(1, (Bar(1.0, 4.0),)))[0] == 1.0


def test_bottleneck_infinite_mismatch():
    value, _ = bottleneck(Barcode(1, (Bar(0.0, None),)), Barcode(1))
    assert value == math.inf


def test_bruteforce_examples():
    assert bottleneck_bruteforce(Barcode(1), Barcode(1)) == 0.0
    assert bottleneck_bruteforce(Barcode(1, (Bar(0.0, None),)), Barcode(1)) == math.inf
    with pytest.raises(CapExceeded):
        bottleneck_bruteforce([Bar(0.0, 1.0)] * 5, [Bar(0.0, 1.0)] * 4)


def test_bottleneck_matches_bruteforce():
    rng = np.random.default_rng(7)
    for n in (1, 2):
        for _ in range(150):
            B1, B2 = random_barcode(rng, n), random_barcode(rng, n)
            value, matching = bottleneck(B1, B2)
            assert value == bottleneck_bruteforce(B1, B2)
            assert matching.is_valid(len(B1), len(B2))
            if math.isfinite(value):
                assert max(matching_costs(B1, B2, matching), default=0.0) == value


def test_bottleneck_triangle_inequality():
    rng = np.random.default_rng(8)
    for _ in range(100):
        A, B, C = (random_barcode(rng, integer=False) for _ in range(3))
        assert bottleneck(A, C)[0] <= bottleneck(A, B)[0] + bottleneck(B, C)[0] + 1e-12


def test_dist1_examples():
    B = BarcodeFactory()
    assert dist1(B, B)[0] == 0.0
    assert dist1(Barcode(1, (LONG, Bar(0.0, 1.0))), Barcode(1, (LONG,)))[0] == 0.5
    assert dist1(Barcode(1, (Bar(0.0, 2.0),)), Barcode(1, (Bar(0.0, 3.0),)))[0] == 1.0


def test_dist1_with_unmatched_infinite_bar():
    assert dist1(Barcode(1, (Bar(0.0, None),)), Barcode(1))[0] == math.inf


def test_distances_ignore_bar_order():
    rng = np.random.default_rng(9)
    for _ in range(30):
        B1, B2 = random_barcode(rng, integer=False), random_barcode(rng, integer=False)
        shuffled = [B1.bars[i] for i in rng.permutation(len(B1))]
        assert bottleneck(shuffled, B2)[0] == bottleneck(B1, B2)[0]
        assert dist1(shuffled, B2)[0] == pytest.approx(dist1(B1, B2)[0])


def test_bottleneck_stability_one_parameter():
    """d_b(Bar f, Bar g) <= ||f - g||_inf em filtrações aleatórias."""
    rng = np.random.default_rng(10)
    for _ in range(200):
        f = random_monotone_values(rng)
        g = perturb_monotone(f, rng, rng.uniform(0.0, 0.3))
        eps = float(np.max(np.abs(f - g)))
        F = reduce(validate_monotone(f, SMALL_COMPLEX))
        G = reduce(validate_monotone(g, SMALL_COMPLEX))
        for degree in (0, 1):
            assert bottleneck(barcode(F, degree), barcode(G, degree))[0] <= eps + 1e-12


def test_signed_bottleneck_examples():
    S = SignedBarcodeFactory()
    assert signed_bottleneck(S, S) == 0.0
    hook = Bar((0.0, 0.0), (3.0, 1.0))
    assert signed_bottleneck(SignedBarcode(2, (hook,)), SignedBarcode(2)) == 0.5


def test_signed_bottleneck_is_symmetric():
    rng = np.random.default_rng(11)
    for _ in range(50):
        S1 = random_barcode(rng, n=2, signed=True, max_bars=3)
        S2 = random_barcode(rng, n=2, signed=True, max_bars=3)
        assert signed_bottleneck(S1, S2) == signed_bottleneck(S2, S1)


def test_signed_bottleneck_stability():
    """Perturbações de tamanho eps movem o barcode com sinal no máximo 9 eps."""
    rng = np.random.default_rng(12)
    for _ in range(50):
        f = random_monotone_values(rng, PATH, n=2, integer=True, high=2)
        g = perturb_monotone(f, rng, 1.0, PATH, upward=True).round()
        eps = float(np.max(np.abs(f - g)))
        M = grid_homology_module(validate_monotone(f, PATH), degree=0)
        N = grid_homology_module(validate_monotone(g, PATH), degree=0)
        distance = signed_bottleneck(signed_barcode(M), signed_barcode(N))
        assert distance <= SIGNED_STABILITY_HOOKS * eps + 1e-12


def test_signed_bottleneck_stability_of_free_resolutions():
    """Barcodes com sinal de resoluções livres movem no máximo 3 eps."""
    rng = np.random.default_rng(13)
    for _ in range(50):
        f = random_monotone_values(rng, PATH, n=2, integer=True, high=2)
        g = perturb_monotone(f, rng, 1.0, PATH, upward=True).round()
        eps = float(np.max(np.abs(f - g)))
        M = grid_homology_module(validate_monotone(f, PATH), degree=0)
        N = grid_homology_module(validate_monotone(g, PATH), degree=0)
        S, T = signed_barcode(M, family="upsets"), signed_barcode(N, family="upsets")
        assert all(bar.is_infinite for bar in S.bars + T.bars)
        assert signed_bottleneck(S, T) <= SIGNED_STABILITY_UPSETS * eps + 1e-12
