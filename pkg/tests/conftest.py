import pytest

from voxmink import BallModelParams, ConstantRadius, default_class_table

# Acceptance results collected by the criterion fixture, printed as one
# line each at the end of the run.
_ACCEPTANCE: list[tuple[int, str, bool, str]] = []


@pytest.fixture(scope="session")
def table():
    return default_class_table()


@pytest.fixture(scope="session")
def bench_model():
    return BallModelParams(0.1, ConstantRadius(1.0))


@pytest.fixture
def criterion():
    """Record one acceptance criterion outcome and assert it."""

    def record(number: int, title: str, passed: bool, detail: str = ""):
        _ACCEPTANCE.append((number, title, bool(passed), detail))
        assert passed, f"criterion {number} ({title}): {detail}"

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, passed, detail in sorted(_ACCEPTANCE):
        status = "PASS" if passed else "FAIL"
        line = f"criterion {number:2d} [{status}] {title}"
        if detail:
            line += f": {detail}"
        terminalreporter.write_line(line)
