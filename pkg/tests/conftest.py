"""Acceptance bookkeeping: one PASS/FAIL line per criterion after the run."""
from collections import defaultdict

import pytest

CRITERIA = {
    1: "closed-form half-integer energies",
    2: "surd energies of (2, 3/2)",
    3: "cubic and biquadratic root systems",
    4: "tan and cot family energies",
    5: "critical roots equal Lie-matrix eigenvalues",
    6: "eigenfunction proportionality to closed forms",
    7: "residual convergence of assembled states",
    8: "Hill-oracle agreement",
    9: "elliptic kernel identities",
    10: "algebraic-line classification",
    11: "limit suite",
}

_results = defaultdict(list)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number = marker.args[0]
    if report.when == "call":
        passed = report.passed and not hasattr(report, "wasxfail")
        note = getattr(report, "wasxfail", "") if hasattr(report, "wasxfail") else ""
        _results[number].append((item.name, passed, note))
    elif report.when == "setup" and not report.passed:
        _results[number].append((item.name, False, "setup failed or skipped"))


def acceptance_lines():
    lines = []
    for number, title in CRITERIA.items():
        runs = _results.get(number)
        if not runs:
            continue
        ok = all(passed for _, passed, _ in runs)
        lines.append(f"criterion {number:>2} ({title}): {'PASS' if ok else 'FAIL'}")
        for name, passed, note in runs:
            if not passed:
                lines.append(f"    failing: {name}" + (f" [{note}]" if note else ""))
    return lines


def pytest_terminal_summary(terminalreporter):
    lines = acceptance_lines()
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
