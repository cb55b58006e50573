import numpy as np
import pytest

_CRITERIA = []


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def criterion():
    """Record one acceptance line: ``criterion(number, title, passed, detail)``.

    ``passed=None`` records a skipped criterion.
    """

    def record(number, title, passed, detail=""):
        _CRITERIA.append((number, title, None if passed is None else bool(passed), detail))
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, passed, detail in sorted(_CRITERIA, key=lambda c: c[0]):
        mark = "SKIP" if passed is None else ("PASS" if passed else "FAIL")
        line = f"[{mark}] {number}. {title}"
        if detail:
            line += f" -- {detail}"
        terminalreporter.write_line(line)
