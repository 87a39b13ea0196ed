"""Print one ACCEPTANCE line per criterion at the end of the run."""

import re

_PAT = re.compile(r"test_acceptance\.py::test_acceptance_(\d+)")


def pytest_terminal_summary(terminalreporter):
    results = {}
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            m = _PAT.search(rep.nodeid)
            if m:
                n = int(m.group(1))
                ok = outcome == "passed" and results.get(n, True)
                results[n] = ok
    if not results:
        return
    terminalreporter.write_line("")
    for n in sorted(results):
        verdict = "PASS" if results[n] else "FAIL"
        terminalreporter.write_line(f"ACCEPTANCE {n}: {verdict}")
