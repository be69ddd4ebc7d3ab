import re

import pytest

from bellcut.elimination import census
from bellcut.hull import cut_polytope_facets


def pytest_addoption(parser):
    parser.addoption("--long-running", action="store_true", default=False,
                     help="run hours-scale checks (CUT_7)")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--long-running"):
        return
    skip = pytest.mark.skip(reason="needs --long-running")
    for item in items:
        if "long_running" in item.keywords:
            item.add_marker(skip)


_CRITERION = re.compile(r"test_acceptance\.py::test_criterion_(\d+)_(\w+)")


def pytest_terminal_summary(terminalreporter):
    rows = []
    for outcome in ("passed", "failed", "skipped"):
        for rep in terminalreporter.stats.get(outcome, []):
            if getattr(rep, "when", "call") not in ("call", "setup"):
                continue
            m = _CRITERION.search(rep.nodeid)
            if m:
                label = {"passed": "PASS", "failed": "FAIL",
                         "skipped": "SKIP"}[outcome]
                rows.append((int(m.group(1)), m.group(2), label))
    if not rows:
        return
    terminalreporter.section("acceptance criteria")
    for num, name, label in sorted(set(rows)):
        terminalreporter.write_line(f"criterion {num:2d} {label}  {name}")


@pytest.fixture(scope="session")
def hulls():
    return {n: cut_polytope_facets(n) for n in (3, 4, 5, 6)}


@pytest.fixture(scope="session")
def censuses(hulls):
    return {n: census(n, [c.representative for c in hulls[n].classes])
            for n in (3, 4, 5, 6)}
