import os

import pytest

LONG = os.environ.get("TURYN_LONG_TESTS", "") not in ("", "0")

# criterion number -> (description, passed); filled in by test_acceptance
ACCEPTANCE: dict[int, tuple[str, bool]] = {}


def pytest_collection_modifyitems(config, items):
    if LONG:
        return
    skip = pytest.mark.skip(reason="long test; set TURYN_LONG_TESTS=1")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        desc, ok = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {desc}")
