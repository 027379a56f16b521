import random

import pytest

from zetaforms.bigmath import PrecisionContext


@pytest.fixture
def ctx128() -> PrecisionContext:
    return PrecisionContext(128, 64)


@pytest.fixture
def ctx256() -> PrecisionContext:
    return PrecisionContext(256, 64)


@pytest.fixture
def rng() -> random.Random:
    # fixed seed: failures must reproduce byte for byte
    return random.Random(0x5EED)
