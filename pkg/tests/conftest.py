import numpy as np
import pytest

# acceptance tests register their verdicts here; printed at the end of the run
ACCEPTANCE = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(name): one acceptance criterion")


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("acceptance")
    if marker is None or call.when != "call":
        return
    name = marker.args[0]
    if call.excinfo is None:
        ACCEPTANCE[name] = ("PASS", ACCEPTANCE.get(name, (None, ""))[1])
    else:
        msg = str(call.excinfo.value).strip().splitlines()
        ACCEPTANCE[name] = ("FAIL", msg[0] if msg else call.excinfo.typename)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, (verdict, note) in ACCEPTANCE.items():
        line = f"{verdict}  {name}"
        if note:
            line += f"  -- {note}"
        terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
