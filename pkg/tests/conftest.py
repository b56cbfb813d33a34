"""Collect the acceptance criteria outcomes and print one line per criterion."""

import pytest

RESULTS: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion checked by the test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when != "call":
        return
    num, title = mark.args
    detail = dict(item.user_properties).get("detail", "")
    RESULTS[num] = (title, rep.passed, detail, rep.duration)


def pytest_terminal_summary(terminalreporter):
    if not RESULTS:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for num in sorted(RESULTS):
        title, ok, detail, dur = RESULTS[num]
        tr.write_line(f"[{num:2d}] {'PASS' if ok else 'FAIL'}  {title}  ({detail}; {dur:.1f} s)")
    n_ok = sum(r[1] for r in RESULTS.values())
    tr.write_line(f"{n_ok}/{len(RESULTS)} criteria pass")
