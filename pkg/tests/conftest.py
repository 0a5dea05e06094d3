import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from weakmeas import ScenarioConfig  # noqa: E402


@pytest.fixture
def cfg200():
    return ScenarioConfig.defaults(200)


@pytest.fixture
def cfg400():
    return ScenarioConfig.defaults(400)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
