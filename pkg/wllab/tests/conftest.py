"""
Shared fixtures for the wllab test suite
"""

import pytest

from wllab.generators import named


@pytest.fixture
def path3():
    """Path a-b-c"""
    return named("path", n=3)


@pytest.fixture
def cycle4():
    return named("cycle", n=4)


@pytest.fixture
def cycle5():
    return named("cycle", n=5)


@pytest.fixture
def complete4():
    return named("complete", n=4)


@pytest.fixture
def small_corpus():
    """A handful of graphs on at most 5 vertices"""
    return [
        named("path", n=3),
        named("path", n=4),
        named("cycle", n=4),
        named("cycle", n=5),
        named("complete", n=4),
        named("complete_bipartite", a=1, b=3),
    ]
