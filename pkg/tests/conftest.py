import pytest

_results = []


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    marker = report.user_properties and dict(report.user_properties).get("criterion")
    if marker:
        _results.append((marker, report.outcome))


@pytest.fixture(autouse=True)
def _criterion_tag(request, record_property):
    m = request.node.get_closest_marker("criterion")
    if m:
        record_property("criterion", f"{m.args[0]}. {m.args[1]}")


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for label, outcome in sorted(_results, key=lambda r: int(r[0].split(".")[0])):
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"[{status}] criterion {label}")
