"""Terminal summary for the acceptance suite: one pass/fail line per criterion."""

_results = {}


def pytest_runtest_logreport(report):
    if report.when != "call":
        return
    name = report.nodeid.rsplit("::", 1)[-1]
    if "test_acceptance" in report.nodeid and name.startswith("test_criterion_"):
        _results[name] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_results, key=lambda s: int(s.split("_")[2])):
        verdict = "PASS" if _results[name] == "passed" else "FAIL"
        label = name.replace("test_", "", 1)
        terminalreporter.write_line(f"{verdict}  {label}")
