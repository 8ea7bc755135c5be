import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

CRITERIA: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def criterion():
    """record(number, ok, detail) stores one acceptance line for the summary."""
    def record(number: int, ok: bool, detail: str):
        CRITERIA[number] = (ok, detail)
        line = f"CRITERION {number}: {'PASS' if ok else 'FAIL'}  {detail}"
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(CRITERIA):
        ok, detail = CRITERIA[number]
        terminalreporter.write_line(f"CRITERION {number}: {'PASS' if ok else 'FAIL'}  {detail}")
