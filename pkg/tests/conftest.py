import random

import pytest

from plausinet import algebras as A

SEED = 20240601


def instances(kind, n, count, seed=SEED):
    """Seeded random measures of one family; the same seed gives the same list."""
    rng = random.Random(f"{seed}-{kind}-{n}")
    return [A.random_measure(kind, n, rng) for _ in range(count)]


@pytest.fixture
def rng():
    return random.Random(SEED)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
