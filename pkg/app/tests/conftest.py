"""Shared fixtures: primes, a seeded generator and the reference masks."""
from typing import Type

import numpy as np
import pytest

from app.models.group import GroupParams, _SparseWord
from app.models.masks import ElementarySpec
from app.services.mask_service import constant_mask, haar_mask
from app.services.mra_service import generate_elementary


def random_word(cls: Type[_SparseWord], params: GroupParams, rng, low: int = -4, high: int = 4):
    digits = rng.integers(0, params.p, size=high - low + 1)
    return cls.from_digits(params, low, digits.tolist())


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(params=[2, 3, 5], ids=lambda p: f"p{p}")
def params(request):
    return GroupParams(request.param)


@pytest.fixture
def p3():
    return GroupParams(3)


@pytest.fixture
def p5():
    return GroupParams(5)


@pytest.fixture
def p3_spec(p3):
    # E = {1}, chain top 2: lambda_0 = lambda_2 = lambda_7 = 1
    return ElementarySpec(params=p3, l=1, zero_set=(1,), chain_top=2, chain_order=(1,))


@pytest.fixture
def p3_mask(p3_spec):
    return generate_elementary(p3_spec)


@pytest.fixture
def haar3(p3):
    return haar_mask(p3, 1)


@pytest.fixture
def ones3(p3):
    return constant_mask(p3, 1)
