import math

import numpy as np
import pytest
from scipy.stats import unitary_group

from core.evolve import embed_beamsplitter
from core.fock import fock_distinguishable, fock_indistinguishable
from core.search import canonical_filter


def random_unitary(dim: int, seed: int) -> np.ndarray:
    return unitary_group.rvs(dim, random_state=seed)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def filter_u():
    return canonical_filter()


@pytest.fixture
def balanced_b():
    return embed_beamsplitter(2, 1, 2)


@pytest.fixture
def b23():
    return embed_beamsplitter(3, 2, 3)


@pytest.fixture
def indistinguishable_pair():
    return fock_indistinguishable(2, (1, 2))


@pytest.fixture
def distinguishable_pair():
    return fock_distinguishable(2, (1, 2))


@pytest.fixture
def beta_grid():
    return [float(b) for b in np.linspace(0.0, 1.0, 11)]


def alpha_for(beta: float) -> float:
    return math.sqrt(1 - beta * beta)
