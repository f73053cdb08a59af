import pytest

# criterion number -> "criterion k: PASS/FAIL ..." line, filled by test_acceptance
ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])


@pytest.fixture
def record_criterion():
    def record(k, title, reports):
        failed = [f"{r.name}: {v.line()}" for r in reports for v in r.failures()]
        status = "FAIL" if failed else "PASS"
        line = f"criterion {k:2d}: {status}  {title}"
        ACCEPTANCE_LINES[k] = line
        print(line)
        for f in failed:
            print(f"    {f}")
        return not failed
    return record
