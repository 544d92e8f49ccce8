import random

import pytest

from minorkit.graphs import Graph


def random_graph(n: int, p: float, rng: random.Random) -> Graph:
    edges = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p]
    return Graph(n, edges)


@pytest.fixture
def rng():
    return random.Random(20240817)
