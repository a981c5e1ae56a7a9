import pytest

from fdharq.config import from_db


@pytest.fixture
def moderate():
    """Rate-sweep operating point with a moderate direct link, at R = 1."""
    return from_db(p_db=5.0, var_sd_db=5.0, var_sr_rd_db=10.0, var_rr_db=-10.0, rate=1.0)


@pytest.fixture
def clean():
    """Power-sweep operating point without self-interference, at 10 dB."""
    return from_db(p_db=10.0, var_sd_db=0.0, var_sr_rd_db=10.0, var_rr_db=None, rate=1.0)


_ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance(request):
    """Record one PASS/FAIL line for an acceptance criterion."""

    def record(label: str, ok: bool, detail: str) -> bool:
        line = f"{'PASS' if ok else 'FAIL'}  {label}: {detail}"
        _ACCEPTANCE_LINES.append(line)
        reporter = request.config.pluginmanager.get_plugin("terminalreporter")
        if reporter is not None:
            reporter.write_line("")
            reporter.write_line(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
