import pytest


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance: acceptance criteria 1-9")
    config.addinivalue_line("markers", "slow: long-running property checks")


@pytest.hookimpl(trylast=True)
def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(RESULTS):
        ok, detail = RESULTS[n]
        terminalreporter.write_line(f"ACCEPTANCE {n} {'PASS' if ok else 'FAIL'}: {detail}")
