import pytest

_RESULTS = {}


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None or call.when != "call":
        return
    k, title = marker.args
    passed = call.excinfo is None
    detail = getattr(item, "observed", "")
    _RESULTS[k] = (title, passed, detail)


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_RESULTS):
        title, passed, detail = _RESULTS[k]
        line = f"criterion {k}: {'PASS' if passed else 'FAIL'}  {title}"
        if detail:
            line += f"  [{detail}]"
        terminalreporter.write_line(line)


@pytest.fixture
def observe(request):
    """Attach a one-line summary of the measured values to the acceptance report."""

    def _set(text):
        request.node.observed = text

    return _set
