import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from hullmce.field import extension_field, prime_field  # noqa: E402

ACCEPTANCE_RESULTS = {}


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(params=[3, 7, 11])
def F(request):
    return prime_field(request.param)


@pytest.fixture
def F7():
    return prime_field(7)


@pytest.fixture
def F11():
    return prime_field(11)


@pytest.fixture
def E49():
    return extension_field(7, 2)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS):
        terminalreporter.write_line(ACCEPTANCE_RESULTS[key])


@pytest.fixture
def record():
    """record(number, ok, detail): one PASS/FAIL line per acceptance criterion."""

    def _record(number, ok, detail):
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}"
        ACCEPTANCE_RESULTS[number] = line
        print(line)
        return ok

    return _record
