import random
from fractions import Fraction

import pytest

from fewdist.spaces import Space


@pytest.fixture
def rng():
    return random.Random(20240611)


SMALL_SPACES = [
    Space.hamming(6),
    Space.hamming(12),
    Space.johnson(12, 5),
    Space.johnson(23, 7),
    Space.sphere(3),
    Space.sphere(8),
    Space.sphere(23),
]


def random_distances(space, s, rng):
    """Sorted random distances inside the domain of ``space``."""
    if space.is_finite:
        top = space.max_degree
        return tuple(Fraction(v) for v in sorted(rng.sample(range(1, top + 1), s)))
    vals = set()
    while len(vals) < s:
        vals.add(Fraction(rng.randint(-60, 59), 60))
    return tuple(sorted(vals))


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod is not None and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in mod.RESULTS:
            terminalreporter.write_line(line)
