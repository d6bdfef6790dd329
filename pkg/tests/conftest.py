import sys
from pathlib import Path

import pytest
from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", deadline=None, max_examples=50)
settings.load_profile("default")

_ACCEPTANCE = []


@pytest.fixture
def acceptance_log():
    """Collects criterion results for the end-of-session summary."""
    return _ACCEPTANCE


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for res in sorted(_ACCEPTANCE, key=lambda r: r.number):
        terminalreporter.write_line(res.summary())
