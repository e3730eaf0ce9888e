import os
import sys

sys.path.insert(0, os.path.dirname(__file__))

_criteria = {}


def pytest_runtest_logreport(report):
    # test_acceptance names its tests test_cNN_<label>
    name = report.nodeid.rsplit("::", 1)[-1]
    if "test_acceptance" not in report.nodeid or not name.startswith("test_c"):
        return
    if report.when == "call" or (report.when == "setup" and report.failed):
        num = int(name[6:8])
        _criteria[num] = (name[9:], report.passed)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for num in sorted(_criteria):
        label, ok = _criteria[num]
        tr.write_line("%s criterion %d (%s)" % ("PASS" if ok else "FAIL", num,
                                                label.replace("_", " ")))
