"""Collects one verdict per acceptance criterion and prints them at the end."""

_results: dict[str, str] = {}


def pytest_itemcollected(item):
    mark = item.get_closest_marker("acceptance")
    if mark is not None:
        item.user_properties.append(("acceptance", mark.args[0]))


def pytest_runtest_logreport(report):
    labels = [v for k, v in report.user_properties if k == "acceptance"]
    if not labels or (report.when != "call" and report.passed):
        return
    verdict = "PASS" if report.passed else "SKIP" if report.skipped else "FAIL"
    label = labels[0]
    if _results.get(label, "PASS") == "PASS":
        _results[label] = verdict


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for label, verdict in _results.items():
        terminalreporter.write_line(f"{verdict}  {label}")
