"""Collects acceptance outcomes and prints one line per criterion."""

_acceptance = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py::test_criterion_" not in report.nodeid:
        return
    name = report.nodeid.rsplit("::", 1)[1]
    if report.when == "call":
        _acceptance[name] = report.outcome
    elif report.outcome == "failed":
        _acceptance[name] = "failed"  # setup errors count as failures


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_acceptance):
        parts = name.split("_")  # test, criterion, NN, slug...
        label = f"criterion-{parts[2]} {'-'.join(parts[3:])}"
        verdict = "PASS" if _acceptance[name] == "passed" else "FAIL"
        terminalreporter.write_line(f"{label}: {verdict}")
