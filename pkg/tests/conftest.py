import numpy as np
import pytest

from fusedetect.imaging import GrayPlane, RgbImage


def make_plane(arr) -> GrayPlane:
    a = np.asarray(arr, dtype=np.float64)
    return GrayPlane(width=a.shape[1], height=a.shape[0], data=a)


def make_image(arr) -> RgbImage:
    a = np.asarray(arr, dtype=np.uint8)
    return RgbImage(width=a.shape[1], height=a.shape[0], data=a)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# The acceptance battery gets its own summary section: one line per
# criterion, labelled by the first docstring line of each test.

_CRITERIA: dict[str, str] = {}
_OUTCOMES: dict[str, str] = {}


def pytest_collection_modifyitems(items):
    for item in items:
        if "test_acceptance.py::" in item.nodeid:
            doc = item.function.__doc__ or item.name
            _CRITERIA[item.nodeid] = doc.strip().splitlines()[0]


def pytest_runtest_logreport(report):
    if report.nodeid not in _CRITERIA:
        return
    if report.when == "call":
        _OUTCOMES[report.nodeid] = "PASS" if report.passed else "FAIL"
    elif report.when == "setup":
        if report.failed:
            _OUTCOMES[report.nodeid] = "FAIL"
        elif report.skipped:
            _OUTCOMES[report.nodeid] = "SKIP"


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for nodeid, label in _CRITERIA.items():
        outcome = _OUTCOMES.get(nodeid, "FAIL")
        terminalreporter.write_line(f"{outcome}  {label}")
