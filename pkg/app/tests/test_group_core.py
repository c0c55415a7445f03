import itertools
from fractions import Fraction

import numpy as np
import pytest

from app.models.errors import InvalidParams, ParamsMismatch
from app.models.group import CharacterWord, GroupElement, GroupParams
from app.services.group_core import add, character_value, dilate, dilate_character, neg, pair, sub
from app.tests.conftest import random_word


def elements(params, low, high):
    width = high - low + 1
    for digits in itertools.product(range(params.p), repeat=width):
        yield GroupElement.from_digits(params, low, digits)


# --- params and words -------------------------------------------------------
@pytest.mark.parametrize("bad", [0, 1, 4, 9, 15])
def test_params_reject_non_primes(bad):
    with pytest.raises(InvalidParams):
        GroupParams(bad)


def test_params_reject_bool():
    with pytest.raises(InvalidParams):
        GroupParams(True)


def test_measures_are_exact():
    params = GroupParams(3)
    assert params.measure_subgroup(2) == Fraction(1, 9)
    assert params.measure_subgroup(-1) == 3
    assert params.measure_annihilator(2) == 9
    assert params.scale(-3) == Fraction(1, 27)


def test_digit_out_of_range_rejected():
    with pytest.raises(InvalidParams):
        GroupElement.from_map(GroupParams(3), {0: 3})


def test_canonical_form_drops_zeros():
    params = GroupParams(5)
    x = GroupElement.from_map(params, {-2: 0, 1: 4, 3: 0})
    assert x == GroupElement.basis(params, 1, 4)
    assert x.support() == (1,)
    assert GroupElement.zero(params).valuation() is None


def test_subgroup_and_h0_membership():
    params = GroupParams(3)
    x = GroupElement.from_map(params, {-2: 1, -1: 2})
    assert x.in_subgroup(-2) and not x.in_subgroup(-1)
    assert x.in_h0() and x.in_h0(2) and not x.in_h0(1)
    assert not GroupElement.basis(params, 0).in_h0()
    assert CharacterWord.rademacher(params, 0).in_annihilator(1)
    assert not CharacterWord.rademacher(params, 0).in_annihilator(0)


# --- addition -----------------------------------------------------------------
def test_add_identity(rng):
    params = GroupParams(3)
    x = random_word(GroupElement, params, rng)
    assert add(x, GroupElement.zero(params)) == x


def test_add_has_no_carry():
    params = GroupParams(3)
    two = GroupElement.basis(params, -1, 2)
    assert add(two, two) == GroupElement.basis(params, -1, 1)


def test_neg_is_inverse_p5(rng):
    params = GroupParams(5)
    for _ in range(50):
        x = random_word(GroupElement, params, rng)
        assert add(x, neg(x)).is_zero()


def test_neg_small_cases(rng):
    params = GroupParams(3)
    assert neg(GroupElement.zero(params)).is_zero()
    assert neg(GroupElement.basis(params, 0, 1)) == GroupElement.basis(params, 0, 2)
    p7 = GroupParams(7)
    x = random_word(GroupElement, p7, rng)
    assert sub(x, x).is_zero()


def test_add_rejects_mixed_primes():
    with pytest.raises(ParamsMismatch):
        add(GroupElement.basis(GroupParams(3), 0), GroupElement.basis(GroupParams(5), 0))


@pytest.mark.parametrize("p", [2, 3])
def test_group_axioms_exhaustive(p):
    params = GroupParams(p)
    grid = list(elements(params, -1, 1))
    zero = GroupElement.zero(params)
    for x in grid:
        assert add(x, zero) == x
        assert add(x, neg(x)) == zero
        for y in grid:
            assert add(x, y) == add(y, x)


def test_associativity_random(rng):
    params = GroupParams(5)
    for _ in range(100):
        x, y, z = (random_word(GroupElement, params, rng, -2, 2) for _ in range(3))
        assert add(add(x, y), z) == add(x, add(y, z))


# --- dilation -----------------------------------------------------------------
def test_dilate_moves_digits_down():
    params = GroupParams(3)
    assert dilate(GroupElement.basis(params, 0), 1) == GroupElement.basis(params, -1)


def test_dilate_zero_and_round_trip(rng):
    params = GroupParams(5)
    for _ in range(20):
        x = random_word(GroupElement, params, rng)
        assert dilate(x, 0) == x
        assert dilate(dilate(x, 3), -3) == x


def test_dilate_is_additive(rng):
    params = GroupParams(3)
    x, y = random_word(GroupElement, params, rng), random_word(GroupElement, params, rng)
    assert dilate(add(x, y), 1) == add(dilate(x, 1), dilate(y, 1))


def test_character_dilation_moves_exponents_up():
    params = GroupParams(3)
    for k in range(-3, 4):
        r_k = CharacterWord.rademacher(params, k)
        moved = dilate_character(r_k, 1)
        assert moved == CharacterWord.rademacher(params, k + 1)
        for j in range(-4, 5):
            g_j = GroupElement.basis(params, j)
            assert pair(moved, g_j) == pair(r_k, dilate(g_j, 1))


def test_character_dilation_adjoint_random(rng):
    params = GroupParams(5)
    for _ in range(100):
        zeta = random_word(CharacterWord, params, rng)
        x = random_word(GroupElement, params, rng)
        n = int(rng.integers(-4, 5))
        assert pair(dilate_character(zeta, n), x) == pair(zeta, dilate(x, n))
        assert dilate_character(dilate_character(zeta, n), -n) == zeta
    assert dilate_character(zeta, 0) == zeta


# --- pairing ------------------------------------------------------------------
def test_pairing_of_rademacher_and_basis():
    params = GroupParams(5)
    for n in range(-2, 3):
        for k in range(-2, 3):
            expected = 1 if n == k else 0
            assert pair(CharacterWord.rademacher(params, n), GroupElement.basis(params, k)) == expected


def test_pairing_example():
    params = GroupParams(3)
    zeta = CharacterWord.from_map(params, {-1: 2, 0: 1})
    x = GroupElement.from_map(params, {-1: 2, 0: 2})
    assert pair(zeta, x) == 0


def test_pairing_is_bilinear(rng):
    params = GroupParams(7)
    for _ in range(50):
        zeta = random_word(CharacterWord, params, rng)
        x, y = random_word(GroupElement, params, rng), random_word(GroupElement, params, rng)
        assert pair(zeta, add(x, y)) == (pair(zeta, x) + pair(zeta, y)) % 7


def test_annihilator_law_exhaustive():
    params = GroupParams(3)
    n = 0
    characters = [CharacterWord.from_digits(params, -2, d) for d in itertools.product(range(3), repeat=2)]
    for zeta in characters:
        assert zeta.in_annihilator(n)
        for x in elements(params, 0, 2):
            assert pair(zeta, x) == 0


def test_character_value_is_root_of_unity():
    params = GroupParams(5)
    value = character_value(CharacterWord.rademacher(params, 0, 2), GroupElement.basis(params, 0, 1))
    assert value == pytest.approx(np.exp(2j * np.pi * 2 / 5))
