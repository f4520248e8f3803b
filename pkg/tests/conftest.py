import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))


def pytest_runtest_logreport(report):
    """One visible PASS/FAIL line per acceptance criterion, bypassing capture."""
    if report.when != "call" or "test_acceptance" not in report.nodeid:
        return
    name = report.nodeid.split("::", 1)[1]
    status = "PASS" if report.passed else "FAIL"
    sys.__stdout__.write(f"[ACCEPTANCE] {name}: {status} ({report.duration:.1f}s)\n")
    sys.__stdout__.flush()
