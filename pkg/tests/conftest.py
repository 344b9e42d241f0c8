import _criteria


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _criteria.LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria.LINES):
        ok, detail = _criteria.LINES[n]
        terminalreporter.write_line(
            f"[criterion {n}] {'PASS' if ok else 'FAIL'}: {detail}"
        )
