import itertools
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from hypext.hcore import Hypergraph, complete, fano

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@st.composite
def hypergraphs(draw, min_n=3, max_n=7):
    n = draw(st.integers(min_n, max_n))
    triples = list(itertools.combinations(range(n), 3))
    keep = draw(st.lists(st.booleans(), min_size=len(triples), max_size=len(triples)))
    return Hypergraph(3, n, [t for t, k in zip(triples, keep) if k])


@pytest.fixture
def K4():
    return complete(4)


@pytest.fixture
def F7():
    return fano()


def zeta(n_t: int) -> Fraction:
    """Bookkeeping constant for the stripping tests; a configuration choice."""
    return Fraction(1, (10 * n_t) ** 2)
