import pytest

from claimtrace.fixtures import GROUND_TRUTH, black_box_demo, transparent_demo
from claimtrace.scoring import LexicalScorer


@pytest.fixture
def scorer():
    return LexicalScorer()


@pytest.fixture
def black_box():
    return black_box_demo()


@pytest.fixture
def transparent():
    return transparent_demo()


@pytest.fixture
def ground_truth():
    return list(GROUND_TRUTH)
