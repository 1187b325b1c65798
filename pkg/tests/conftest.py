import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("pdsplit", deadline=None, max_examples=60)
settings.load_profile("pdsplit")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_ACCEPTANCE = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or rep.when != "call":
        return
    detail = dict(item.user_properties).get("detail", "")
    status = "PASS" if rep.passed else "FAIL"
    _ACCEPTANCE.append((marker.args[0], status, detail))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num, status, detail in sorted(_ACCEPTANCE):
        terminalreporter.write_line(f"criterion {num}: {status}  {detail}")
