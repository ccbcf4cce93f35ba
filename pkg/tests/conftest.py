import numpy as np
import pytest

from o2reps.groups import GroupSpec
from o2reps.rings import RingSpec


def spec(family, n, p, kind="unramified", m=1):
    return GroupSpec(family, n, RingSpec(kind, p, m))


@pytest.fixture(params=["unramified", "ramified"])
def kind(request):
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(RESULTS):
        ok, detail = RESULTS[num]
        terminalreporter.write_line(f"criterion {num}: {'PASS' if ok else 'FAIL'} ({detail})")
