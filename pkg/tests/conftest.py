import os

from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", deadline=None, max_examples=400)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

_CRITERIA: dict[int, list[tuple[str, str]]] = {}


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None or call.when != "call":
        return
    if call.excinfo is None:
        outcome = "passed"
    elif item.get_closest_marker("xfail") is not None:
        outcome = "known failure"
    else:
        outcome = "failed"
    _CRITERIA.setdefault(marker.args[0], []).append((item.name, outcome))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        results = _CRITERIA[n]
        ok = all(o == "passed" for _, o in results)
        bad = [f"{name} ({o})" for name, o in results if o != "passed"]
        line = f"criterion {n}: {'PASS' if ok else 'FAIL'} ({sum(o == 'passed' for _, o in results)}/{len(results)})"
        terminalreporter.write_line(line + ("" if ok else " -- " + ", ".join(bad)))
