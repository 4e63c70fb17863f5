import random

import pytest

from quantkmeans.graph import Digraph


def cycle_digraph(n: int) -> Digraph:
    """Directed n-cycle 0 -> 1 -> ... -> n-1 -> 0."""
    return Digraph(n, [((i + 1) % n, i) for i in range(n)])


def complete_digraph(n: int) -> Digraph:
    return Digraph(n, [(j, i) for i in range(n) for j in range(n) if i != j])


@pytest.fixture
def rng():
    return random.Random(20240817)
