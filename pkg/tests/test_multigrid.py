from collections import Counter
from pathlib import Path

import numpy as np
import pytest

import persistlab
from persistlab.exceptions import CapExceeded, CommutativityViolation, InvalidParametersError
from persistlab.f2linalg import F2Matrix, rank
from persistlab.filtration import SimplicialComplex, complex_from_simplices, validate_monotone
from persistlab.io_utils import read_module_json
from persistlab.multigrid import (
    Grid,
    GridModule,
    HookInterval,
    HookResolution,
    IndecomposabilityVerdict,
    SignedBarcode,
    check_relative_exactness,
    direct_sum,
    euler_characteristic,
    grid_homology_module,
    grothendieck_reduce,
    hom_space,
    hook_module,
    indecomposability,
    is_indecomposable,
    minimal_hook_resolution,
    signed_barcode,
    signed_barcode_of_resolution,
    zero_module,
)
from persistlab.persistence1 import AnModule, Bar, Barcode, barcode_of_an_module
from tests.factories import random_grid_module

FIXTURE = Path(persistlab.__file__).parent / "fixtures" / "indecomposable_3x3.json"
GRID = Grid((3, 3))


@pytest.fixture
def indecomposable():
    return read_module_json(FIXTURE)


def grid_module_of_an_module(M: AnModule) -> GridModule:
    return GridModule(Grid((M.k,)), np.array(M.dims), {((i,), 0): f for i, f in enumerate(M.maps)})


def test_fixture_is_a_valid_module(indecomposable):
    indecomposable.validate()
    assert indecomposable.dims.tolist() == [[3, 3, 2], [3, 2, 1], [2, 1, 1]]


def test_validate_detects_non_commuting_square():
    grid = Grid((2, 2))
    ones = F2Matrix.identity(1)
    arrows = {((0, 0), 0): ones, ((0, 0), 1): ones, ((1, 0), 1): ones, ((0, 1), 0): F2Matrix.zeros(1, 1)}
    M = GridModule(grid, np.ones((2, 2)), arrows)
    with pytest.raises(CommutativityViolation) as exc:
        M.validate()
    assert exc.value.cell == (0, 0)


def test_grid_homology_merge_example():
    complex = complex_from_simplices([(0, 1)])
    filtration = validate_monotone([[0, 0], [0, 0], [1, 1]], complex)
    M = grid_homology_module(filtration, ((0.0, 1.0), (0.0, 1.0)), degree=0)
    assert M.dims.tolist() == [[2, 2], [2, 1]]
    assert rank(M.map_between((0, 1), (1, 1))) == 1
    M.validate()


def test_grid_homology_trivial_cases():
    empty = validate_monotone(np.zeros((0, 2)), SimplicialComplex(()))
    assert grid_homology_module(empty, ((0.0,), (0.0,))).total_dim() == 0
    default_levels = grid_homology_module(empty)
    assert default_levels.grid.sizes == (1, 1)
    assert default_levels.total_dim() == 0

    point = validate_monotone([[0.0, 0.0]], complex_from_simplices([(0,)]))
    M = grid_homology_module(point, ((0.0, 1.0), (0.0, 1.0)))
    assert M.dims.tolist() == [[1, 1], [1, 1]]
    assert all(M.arrow(cell, axis) == F2Matrix.identity(1) for (cell, axis) in M.arrows)


def test_grid_homology_requires_covering_levels():
    point = validate_monotone([[0.5, 0.0]], complex_from_simplices([(0,)]))
    with pytest.raises(InvalidParametersError):
        grid_homology_module(point, ((0.0, 1.0), (0.0,)))


def test_hom_space_examples(indecomposable):
    upset = HookInterval((0, 0))
    assert hom_space(upset, hook_module(upset, GRID)).cols == 1
    assert hom_space(upset, indecomposable).cols == 3
    assert hom_space(HookInterval((0, 0), (1, 1)), hook_module(upset, GRID)).cols == 0


def test_hook_module_resolves_to_itself():
    for hook in (HookInterval((0, 1)), HookInterval((0, 0), (2, 1)), HookInterval((1, 0), (1, 2))):
        res = minimal_hook_resolution(hook_module(hook, GRID))
        assert res.length == 0
        assert res.terms == ((hook,),)


def test_indecomposable_fixture_resolution(indecomposable):
    res = minimal_hook_resolution(indecomposable)
    assert res.length == 1
    assert res.minimal
    assert np.array_equal(euler_characteristic(res), indecomposable.dims)
    assert check_relative_exactness(res, indecomposable).ok


def test_adding_a_degree_one_hook(indecomposable):
    res = minimal_hook_resolution(indecomposable)
    hook = res.terms[1][0]
    bigger = minimal_hook_resolution(direct_sum(indecomposable, hook_module(hook, GRID)))
    assert bigger.multiset(0) == res.multiset(0) + Counter([hook])
    assert bigger.multiset(1) == res.multiset(1)


def test_signed_barcode_is_additive_in_grothendieck_group(indecomposable):
    res = minimal_hook_resolution(indecomposable)
    hook = res.terms[1][0]
    base = signed_barcode(indecomposable)
    bigger = signed_barcode(direct_sum(indecomposable, hook_module(hook, GRID)))
    expected = SignedBarcode(2, base.positive + (hook.to_bar(GRID),), base.negative)
    assert grothendieck_reduce(bigger) == grothendieck_reduce(expected)


def test_signed_barcode_examples(indecomposable):
    free = signed_barcode(hook_module(HookInterval((1, 0)), GRID))
    assert free == SignedBarcode(2, (Bar((1.0, 0.0)),), ())
    assert signed_barcode(zero_module(GRID)) == SignedBarcode(2)

    res = minimal_hook_resolution(indecomposable)
    S = signed_barcode_of_resolution(res)
    assert len(S.positive) == len(res.terms[0])
    assert len(S.negative) == len(res.terms[1])


def test_signed_barcode_uses_grid_coordinates():
    grid = Grid((2, 2), ((0.0, 0.5), (1.0, 3.0)))
    S = signed_barcode(hook_module(HookInterval((0, 0), (1, 1)), grid))
    assert S.positive == (Bar((0.0, 1.0), (0.5, 3.0)),)


def test_corrupted_differential_fails_exactness(indecomposable):
    res = minimal_hook_resolution(indecomposable)
    broken = HookResolution(
        res.grid,
        res.family,
        res.terms,
        (F2Matrix.zeros(*res.differentials[0].shape),),
        res.augmentation,
    )
    report = check_relative_exactness(broken, indecomposable)
    assert not report.ok
    assert report.hook is not None


def test_wrong_terms_fail_euler_check(indecomposable):
    res = minimal_hook_resolution(indecomposable)
    truncated = HookResolution(res.grid, res.family, res.terms[:1], (), res.augmentation)
    report = check_relative_exactness(truncated, indecomposable)
    assert not report.ok
    assert "Euler" in report.reason


def test_random_modules_resolve_exactly():
    """Resoluções de módulos aleatórios têm comprimento <= 2 e passam na verificação."""
    rng = np.random.default_rng(5)
    for sizes, count in (((3, 3), 150), ((4, 4), 50)):
        for _ in range(count):
            M = random_grid_module(rng, sizes)
            M.validate()
            res = minimal_hook_resolution(M)
            assert res.length <= 2
            assert np.array_equal(euler_characteristic(res), M.dims)
            assert check_relative_exactness(res, M).ok


def test_free_resolutions_use_upsets_only(indecomposable):
    res = minimal_hook_resolution(indecomposable, family="upsets")
    assert res.length <= 2
    assert all(I.is_upset for term in res.terms for I in term)
    assert np.array_equal(euler_characteristic(res), indecomposable.dims)
    assert check_relative_exactness(res, indecomposable).ok

    rng = np.random.default_rng(7)
    for _ in range(30):
        M = random_grid_module(rng, (3, 3))
        free = minimal_hook_resolution(M, family="upsets")
        assert free.length <= 2
        assert check_relative_exactness(free, M).ok


def test_one_parameter_modules_have_no_negative_part():
    rng = np.random.default_rng(6)
    for _ in range(20):
        dims = tuple(int(d) for d in rng.integers(0, 3, size=5))
        maps = [F2Matrix.from_dense(rng.integers(0, 2, size=(dims[i + 1], dims[i]))) for i in range(4)]
        M = AnModule(dims, tuple(maps))
        res = minimal_hook_resolution(grid_module_of_an_module(M))
        assert res.length == 0
        S = signed_barcode_of_resolution(res)
        assert S.negative == ()
        assert Barcode(1, S.positive) == barcode_of_an_module(M)


def test_is_indecomposable_examples(indecomposable):
    hook = hook_module(HookInterval((0, 0), (1, 2)), GRID)
    assert is_indecomposable(hook)
    assert not is_indecomposable(direct_sum(hook, hook))
    assert is_indecomposable(indecomposable)
    assert not is_indecomposable(zero_module(GRID))


def test_is_indecomposable_cap(indecomposable):
    with pytest.raises(CapExceeded):
        is_indecomposable(indecomposable, cap=10)


def test_indecomposability_reports_sampling(monkeypatch):
    hook = hook_module(HookInterval((0, 0), (1, 2)), GRID)
    assert indecomposability(hook) == IndecomposabilityVerdict(True, sampled=False, endomorphism_dim=1)

    monkeypatch.setattr("persistlab.multigrid.ENDOMORPHISM_ENUMERATION_DIM", 0)
    sampled = indecomposability(hook)
    assert sampled.indecomposable and sampled.sampled
    split = indecomposability(direct_sum(hook, hook))
    assert not split.indecomposable
    assert split.endomorphism_dim == 4
