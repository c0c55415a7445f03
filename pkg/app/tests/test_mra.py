import itertools

import numpy as np
import pytest

from app.models.errors import InvalidElementarySpec
from app.models.functions import Grid, SpectralFunction, StepFunction
from app.models.group import GroupParams
from app.models.masks import ElementarySpec
from app.services.atlas_service import degenerate_pattern, haar_pattern, pattern_mask
from app.services.mask_service import constant_mask, necessary_condition, scaling_from_mask
from app.services.mra_service import (
    chain_self_test,
    density_hypothesis,
    generate_elementary,
    mra_report,
    orthonormality_direct,
    orthonormality_spectral,
    shift_gram,
    support_min_shell,
)
from app.services.stepfun import dilate_function, indicator, inverse_fourier


def random_spec(params, l, rng):
    nonzero = np.arange(1, params.p)
    zeros = rng.choice(nonzero, size=l, replace=False)
    top = rng.choice(np.setdiff1d(nonzero, zeros))
    order = rng.permutation(zeros)
    return ElementarySpec(
        params=params,
        l=l,
        zero_set=tuple(int(z) for z in zeros),
        chain_top=int(top),
        chain_order=tuple(int(z) for z in order),
    )


def orthonormal_table(grid, rng):
    """Random spectral table whose |F|^2 sums over the positions 0..M-1 are all 1."""
    tensor = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
    outer = tuple(range(grid.N, grid.width))
    power = np.sum(np.abs(tensor) ** 2, axis=outer, keepdims=True) if outer else np.abs(tensor) ** 2
    return SpectralFunction.from_tensor(grid, tensor / np.sqrt(power))


# --- orthonormality -------------------------------------------------------------
def test_haar_scaling_function_is_orthonormal(p3):
    F = indicator(Grid(p3, 1, 0), "spectral", 0)
    assert orthonormality_spectral(F)
    assert orthonormality_direct(inverse_fourier(F))


def test_flat_table_is_not_orthonormal(p3):
    F = SpectralFunction(Grid(p3, 1, 1), np.ones(9))
    assert not orthonormality_spectral(F)
    assert not orthonormality_direct(inverse_fourier(F))


def test_elementary_scaling_function_is_orthonormal(p3_mask):
    phi_hat, _ = scaling_from_mask(p3_mask)
    assert orthonormality_spectral(phi_hat)
    assert orthonormality_direct(inverse_fourier(phi_hat))


def test_shift_gram_covers_h0(p5):
    phi = inverse_fourier(indicator(Grid(p5, 2, 0), "spectral", 0))
    gram = shift_gram(phi)
    assert set(gram.entries) == set(itertools.product(range(5), repeat=2))
    assert gram.entries[(0, 0)] == pytest.approx(1.0)
    assert abs(gram.off_grid) < 1e-12
    assert gram.deviation() < 1e-12


@pytest.mark.parametrize("p", [2, 3, 5])
def test_orthonormality_criteria_agree_on_random_tables(p, rng):
    grids = [(N, M) for N in (1, 2) for M in (0, 1, 2) if p ** (N + M) <= 625]
    for i in range(200 // 3 + 1):
        N, M = grids[i % len(grids)]
        grid = Grid(GroupParams(p), N, M)
        for F in (orthonormal_table(grid, rng), SpectralFunction(grid, rng.standard_normal(grid.size))):
            assert orthonormality_spectral(F) == orthonormality_direct(inverse_fourier(F))
        assert orthonormality_spectral(orthonormal_table(grid, rng))


@pytest.mark.parametrize("columns_of", [haar_pattern, degenerate_pattern])
def test_orthonormality_survives_one_dilation(p3, p3_mask, columns_of):
    for m in (p3_mask, pattern_mask(p3, columns_of(p3))):
        phi_hat, _ = scaling_from_mask(m)
        phi = inverse_fourier(phi_hat)
        moved = dilate_function(phi, 1)
        scaled = StepFunction(moved.grid, np.sqrt(3) * moved.values)
        assert orthonormality_direct(phi) == orthonormality_direct(scaled)


# --- support and density ------------------------------------------------------
def test_support_min_shell(p3, p3_mask):
    assert support_min_shell(indicator(Grid(p3, 1, 0), "spectral", 0)) == 0
    assert support_min_shell(indicator(Grid(p3, 1, 2), "spectral", -1)) == -1
    phi_hat, _ = scaling_from_mask(p3_mask)
    assert support_min_shell(phi_hat) == 1


def test_density_hypothesis(p3):
    grid = Grid(p3, 1, 1)
    assert density_hypothesis(indicator(grid, "spectral", 0))
    assert not density_hypothesis(SpectralFunction.zeros(grid))


# --- generator ----------------------------------------------------------------
def test_generated_example(p3_mask):
    np.testing.assert_array_equal(np.abs(p3_mask.lambda_table()), [1, 0, 1, 0, 0, 0, 0, 1, 0])
    assert necessary_condition(p3_mask)


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(l=0, zero_set=(), chain_top=2, chain_order=()),
        dict(l=2, zero_set=(1, 2), chain_top=2, chain_order=(1, 2)),
        dict(l=1, zero_set=(2,), chain_top=2, chain_order=(2,)),
        dict(l=1, zero_set=(1,), chain_top=3, chain_order=(1,)),
        dict(l=1, zero_set=(1,), chain_top=2, chain_order=()),
        dict(l=1, zero_set=(0,), chain_top=2, chain_order=(0,)),
        dict(l=1, zero_set=(1,), chain_top=2, chain_order=(1,), phases={7: 2.0}),
        dict(l=1, zero_set=(1,), chain_top=2, chain_order=(1,), phases={0: -1.0}),
    ],
)
def test_invalid_generator_choices(p3, kwargs):
    with pytest.raises(InvalidElementarySpec) as info:
        generate_elementary(ElementarySpec(params=p3, **kwargs))
    assert info.value.details["problems"]


def test_generator_needs_odd_prime():
    spec = ElementarySpec(params=GroupParams(2), l=1, zero_set=(1,), chain_top=1, chain_order=(1,))
    with pytest.raises(InvalidElementarySpec):
        generate_elementary(spec)


def test_phases_keep_the_verdict(p3):
    spec = ElementarySpec(
        params=p3,
        l=1,
        zero_set=(1,),
        chain_top=2,
        chain_order=(1,),
        phases={2: np.exp(0.3j), 7: -1.0, 4: 1j},
    )
    m = generate_elementary(spec)
    # index 4 is a zero entry, its phase is dropped
    assert m.lambda_table()[4] == 0
    assert m.lambda_table()[7] == -1.0
    report = mra_report(m)
    assert report.verdict and report.support_min_shell == 1


def test_chain_self_test(p3_spec, p3_mask, haar3):
    check = chain_self_test(p3_spec, p3_mask)
    assert check.passed
    assert check.chain_tuple == [1, 2] and check.survivors == [[1, 2]]
    assert not chain_self_test(p3_spec, haar3).only_chain_survives


@pytest.mark.parametrize("l", [1, 2, 3])
def test_generated_masks_reach_shell_l(p5, l, rng):
    for _ in range(3):
        spec = random_spec(p5, l, rng)
        m = generate_elementary(spec)
        assert chain_self_test(spec, m).passed
        report = mra_report(m, M_max=4)
        assert report.verdict
        assert report.M == l and report.support_min_shell == l


def test_generated_mask_p7(rng):
    spec = random_spec(GroupParams(7), 3, rng)
    report = mra_report(generate_elementary(spec))
    assert report.verdict and report.support_min_shell == 3


# --- full report --------------------------------------------------------------
def test_report_for_haar(haar3):
    report = mra_report(haar3)
    assert report.verdict
    assert report.M == 0 and report.support_min_shell == 0
    assert report.orthonormality_agrees


def test_report_for_elementary_example(p3_mask):
    report = mra_report(p3_mask)
    assert report.verdict
    assert report.M == 1 and report.support_min_shell == 1
    assert report.mask_valid and report.refinement_holds and report.density_hypothesis


def test_report_for_all_ones(ones3):
    report = mra_report(ones3, M_max=3)
    assert report.no_finite_support
    assert not report.verdict
    assert report.M is None
    assert report.diagnostics["error"] == "NoFiniteSupport"


@pytest.mark.parametrize("p,N", [(7, 2), (11, 1)])
def test_all_ones_at_larger_primes_fails_cleanly(p, N):
    report = mra_report(constant_mask(GroupParams(p), N))
    assert report.no_finite_support and not report.verdict
    assert report.m_max == p - 1
    assert report.validity is None


def test_report_carries_validity(p3_mask):
    report = mra_report(p3_mask)
    assert report.validity.M == 1 and report.validity.valid
    assert report.validity.zero_set_sizes["1"] == 5
    assert report.validity.zero_sets is None
    detailed = mra_report(p3_mask, include_sets=True)
    assert detailed.validity.zero_sets["0"] == [[1]]
    assert detailed.verdict == report.verdict


def test_degenerate_pattern_is_not_orthonormal(p):
    params = GroupParams(p)
    report = mra_report(pattern_mask(params, degenerate_pattern(params)))
    assert report.M == 0 and report.support_min_shell == -1
    assert not report.orthonormal_spectral and not report.orthonormal_direct
    assert not report.verdict


@pytest.fixture(params=[3, 5], ids=lambda p: f"p{p}")
def p(request):
    return request.param


def test_haar_pattern_matches_haar_mask(p):
    params = GroupParams(p)
    report = mra_report(pattern_mask(params, haar_pattern(params)))
    assert report.verdict and report.support_min_shell == 0
