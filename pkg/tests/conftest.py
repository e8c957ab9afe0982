"""Shared pytest plumbing: a one-line verdict per acceptance criterion."""

import re

_CRITERION = re.compile(r"test_acceptance\.py::test_criterion_(\d+)")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    verdicts = {}
    for status, reports in terminalreporter.stats.items():
        for rep in reports:
            match = _CRITERION.search(getattr(rep, "nodeid", "") or "")
            if match is None:
                continue
            num = int(match.group(1))
            if status == "passed":
                verdicts.setdefault(num, True)
            elif status in ("failed", "error"):
                verdicts[num] = False
    if not verdicts:
        return
    terminalreporter.section("acceptance")
    for num in sorted(verdicts):
        word = "PASS" if verdicts[num] else "FAIL"
        terminalreporter.write_line(f"ACCEPTANCE {num}: {word}")
