import random

import pytest

from ergopt.sft import MetricParams, build_subshift, full_shift, golden_mean_shift


@pytest.fixture
def full2():
    return full_shift(2)


@pytest.fixture
def full3():
    return full_shift(3)


@pytest.fixture
def golden():
    return golden_mean_shift()


@pytest.fixture
def metric():
    return MetricParams(0.5, 1.0)


@pytest.fixture
def rng():
    return random.Random(20240901)


@pytest.fixture
def reducible():
    # two fixed loops, no communication
    return build_subshift(2, [[1, 0], [0, 1]])
