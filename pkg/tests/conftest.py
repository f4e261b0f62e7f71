import os
import sys

from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", deadline=None, max_examples=100,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ACCEPTANCE = {}


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    for key in report.keywords:
        if key.startswith("criterion_"):
            k = int(key.split("_")[1])
            # a criterion passes only if every test carrying its marker passes
            if report.outcome != "passed":
                ACCEPTANCE[k] = report.outcome
            else:
                ACCEPTANCE.setdefault(k, "passed")


def pytest_configure(config):
    for k in range(1, 11):
        config.addinivalue_line("markers", f"criterion_{k}: acceptance criterion {k}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        verdict = "PASS" if ACCEPTANCE[k] == "passed" else "FAIL"
        terminalreporter.write_line(f"criterion {k:2d}: {verdict}")
