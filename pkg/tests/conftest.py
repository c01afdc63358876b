import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from paleyrip import (
    PrimeField,
    build_paley_graph,
    build_paley_tournament,
    max_clique,
    max_transitive,
    primes_in_range,
)


@pytest.fixture(scope="session")
def exact_transitive():
    """Exact max-transitive results for every p = 3 (mod 4) below 200."""
    results = {}
    for p in primes_in_range(3, 199, 3):
        results[p] = max_transitive(build_paley_tournament(PrimeField(p)))
    return results


@pytest.fixture(scope="session")
def exact_cliques():
    """Exact clique numbers for every p = 1 (mod 4) below 100."""
    results = {}
    for p in primes_in_range(5, 99, 1):
        results[p] = max_clique(build_paley_graph(PrimeField(p)))
    return results
