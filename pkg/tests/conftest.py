import pytest

# criterion number -> (verdict, detail); filled by test_acceptance
ACCEPTANCE: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        verdict, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"{verdict} criterion {k}: {detail}")


@pytest.fixture
def record():
    def _record(k, ok, detail):
        ACCEPTANCE[k] = ("PASS" if ok else "FAIL", detail)
        print(f"{'PASS' if ok else 'FAIL'} criterion {k}: {detail}")
    return _record
