import pytest

_criteria = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if item.module.__name__ != "test_acceptance" or report.when not in ("setup", "call"):
        return
    number = getattr(item.function, "criterion", None)
    if number is None:
        return
    if report.when == "call" or report.failed:
        doc = (item.function.__doc__ or item.name).strip().splitlines()[0]
        _criteria.append((number, "PASS" if report.passed else "FAIL", doc))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number, status, doc in sorted(_criteria):
        terminalreporter.write_line(f"[{status}] criterion {number:>2}: {doc}")
