import pytest

from recongame.core import GameConfig, GameState

S1 = (0.5, 0.1, 0.1, 0.9)


@pytest.fixture
def cfg():
    return GameConfig(alpha=1.2, l=1.0)


@pytest.fixture
def s1():
    return GameState.from_array(S1)
