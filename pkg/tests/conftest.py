import numpy as np
import pytest

_CRITERIA_KEY = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_CRITERIA_KEY] = []


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def criterion(request):
    """Record a pass/fail line for an acceptance criterion; printed in the terminal summary."""
    lines = request.config.stash[_CRITERIA_KEY]

    def record(name: str, passed: bool, detail: str) -> bool:
        lines.append(f"[{'PASS' if passed else 'FAIL'}] {name}: {detail}")
        print(lines[-1])
        return passed

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_CRITERIA_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
