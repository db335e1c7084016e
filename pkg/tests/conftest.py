import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

CRITERIA: list[tuple[str, bool, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in CRITERIA:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
