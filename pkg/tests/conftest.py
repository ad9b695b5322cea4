import functools

import pytest

from gentleq.orbit import SizeClass, enumerate_classes


@functools.lru_cache(maxsize=None)
def _classes(n: int):
    return tuple(enumerate_classes(SizeClass(n, n + 1), two_cycle=True))


@pytest.fixture(scope="session")
def two_cycle_classes():
    """n -> enumerated two-cycle classes, shared across the whole run."""
    return _classes
