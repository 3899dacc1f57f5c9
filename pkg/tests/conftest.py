import pytest

from cachecast.channel import validate_stats

from helpers import CHAIN3_ROWS, MIXED3_ROWS


@pytest.fixture
def chain3():
    """Three users forming a dominance chain, three levels."""
    return validate_stats(CHAIN3_ROWS)


@pytest.fixture
def mixed3():
    """Three users with no dominance order, three levels."""
    return validate_stats(MIXED3_ROWS)
