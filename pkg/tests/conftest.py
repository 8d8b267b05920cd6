import pytest

# criterion number -> (title, outcome, detail)
_verdicts: dict[int, tuple[str, str, str]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if report.when == "call" or (report.when == "setup" and not report.passed):
        n, title = mark.args
        detail = dict(report.user_properties).get("detail", "")
        _verdicts[n] = (title, "PASS" if report.passed else "FAIL", detail)


def pytest_terminal_summary(terminalreporter):
    if not _verdicts:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_verdicts):
        title, outcome, detail = _verdicts[n]
        line = f"criterion {n:2d}: {outcome}  {title}"
        if detail:
            line += f"  ({detail})"
        terminalreporter.write_line(line)
