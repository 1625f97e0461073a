import pytest

from firmbank.model import ModelParams

ACCEPTANCE: list[str] = []


@pytest.fixture
def small():
    """A quick imperfect-information economy."""
    return ModelParams(n_firms=200, horizon=60, seed=7)


@pytest.fixture
def verdict():
    """Record one acceptance line, then assert it."""

    def _verdict(cid: str, ok: bool, detail: str):
        line = f"[{'PASS' if ok else 'FAIL'}] {cid}: {detail}"
        ACCEPTANCE.append(line)
        print(line)
        assert ok, line

    return _verdict


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
