import pytest

from app.structrl.core.mdp import DeterministicPolicy

from .mdps import coin_mdp, two_cycle


@pytest.fixture
def cycle_mdp():
    return two_cycle()


@pytest.fixture
def coins():
    return coin_mdp()


@pytest.fixture
def coin_family():
    return (DeterministicPolicy((0, 0)), DeterministicPolicy((1, 0)))
