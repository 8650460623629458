import numpy as np
import pytest

from relperf import AgentSpec, CRRA, Game, Market


@pytest.fixture
def hand_market():
    """Two-atom market used throughout: p=(1/2,1/2), z=(1/2,3/2)."""
    return Market(p=np.array([0.5, 0.5]), z=np.array([0.5, 1.5]))


@pytest.fixture
def crra_pair(hand_market):
    """N=2, CRRA(2,2), lambda=(1,1): the fully hand-checkable game."""
    return Game((AgentSpec(CRRA(2.0), 1.0), AgentSpec(CRRA(2.0), 1.0)))
