import random

import pytest
from hypothesis import settings

from chanrest import corpus

# fixed example streams keep runs reproducible; oracle-backed examples vary too much in cost for deadlines
settings.register_profile("chanrest", deadline=None, derandomize=True)
settings.load_profile("chanrest")


@pytest.fixture(scope="session")
def fixtures():
    """Every bundled corpus object, keyed by name."""
    return {name: corpus.load(name) for name in corpus.NAMES}


@pytest.fixture
def rng():
    return random.Random(20240607)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
