import os

from hypothesis import HealthCheck, settings

settings.register_profile(
    "default",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile("thorough", parent=settings.get_profile("default"), max_examples=500)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


# --- acceptance reporting: one PASS/FAIL line per criterion

ACCEPTANCE_TITLES = {
    1: "genus-1 golden values",
    2: "cross-method equivalence on random trees",
    3: "weight calibration on E2",
    4: "flow independence",
    5: "Frobenius suite",
    6: "polyvector algebra suites",
    7: "splitting suite",
    8: "theta fixtures",
}
_acceptance: dict[int, list[bool]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    n = marker.args[0]
    if call.when == "setup" and call.excinfo is not None:
        _acceptance.setdefault(n, []).append(False)
    elif call.when == "call":
        _acceptance.setdefault(n, []).append(call.excinfo is None)


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_acceptance):
        verdict = "PASS" if all(_acceptance[n]) else "FAIL"
        terminalreporter.write_line(f"{verdict} criterion {n}: {ACCEPTANCE_TITLES.get(n, '')}")
