import os

import pytest
from hypothesis import HealthCheck, settings

from cogef.linalg import Matrix

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", parent=settings.get_profile("default"), max_examples=200)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


TRIANGLE_D = Matrix([[1, 0, -1], [-1, 1, 0], [0, -1, 1]])


def cycle_incidence(k):
    """Edge-node incidence of C_k (rows are edges)."""
    return Matrix([[1 if v in (e, (e + 1) % k) else 0 for v in range(k)] for e in range(k)])


@pytest.fixture
def triangle_fixture():
    """Directed triangle, Delta = 2 on the first arc, odd target."""
    return TRIANGLE_D, Matrix([[1, 0, 0]]), Matrix([[2]]), (1,)


# acceptance criteria report ---------------------------------------------------

_CRITERIA: dict[int, list] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion number and title")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or report.when != "call" and not (report.when == "setup" and report.failed):
        return
    num, title = mark.args
    entry = _CRITERIA.setdefault(num, [title, True, 0.0, []])
    entry[1] = entry[1] and report.passed
    entry[2] += report.duration
    if report.failed:
        entry[3].append(item.name)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_CRITERIA):
        title, ok, secs, failed = _CRITERIA[num]
        status = "PASS" if ok else "FAIL"
        extra = f"  [failed: {', '.join(failed)}]" if failed else ""
        terminalreporter.write_line(f"criterion {num:>2}: {status}  {title} ({secs:.2f}s){extra}")
