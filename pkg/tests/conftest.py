import pytest

from twistdioph import LambdaConfig, SelfTwistModel

_RESULTS = []


@pytest.fixture(scope="session")
def model():
    return SelfTwistModel((0, -1, 1))


@pytest.fixture(scope="session")
def cfg(model):
    return LambdaConfig(model)


@pytest.fixture
def criterion():
    """Record a one-line verdict for an acceptance criterion."""

    def record(number, title, ok, detail=""):
        line = f"criterion {number:>2} [{'PASS' if ok else 'FAIL'}] {title}" + (f" ({detail})" if detail else "")
        print(line)
        _RESULTS.append((number, line))
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _RESULTS:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(_RESULTS):
            terminalreporter.write_line(line)
