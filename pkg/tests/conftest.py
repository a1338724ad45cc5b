import re
from collections import defaultdict
from functools import lru_cache

import numpy as np
import pytest

from nucc.datasets import load_molecule


@lru_cache(maxsize=None)
def _molecule(name):
    return load_molecule(name)


@pytest.fixture(scope="session")
def molecule():
    return _molecule


_METRICS: dict[str, list[str]] = defaultdict(list)


@pytest.fixture
def metric(request):
    """Record a measured value to print next to the criterion verdict."""
    return lambda text: _METRICS[request.node.name].append(text)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


_CRITERION = re.compile(r"test_acceptance\.py::test_c(\d+)([a-z]?)_")


def pytest_terminal_summary(terminalreporter):
    """One PASS/FAIL line per acceptance criterion."""
    outcomes = defaultdict(list)
    for status in ("passed", "failed", "error", "skipped"):
        for rep in terminalreporter.stats.get(status, []):
            m = _CRITERION.search(getattr(rep, "nodeid", ""))
            if m and (rep.when == "call" or status != "passed"):
                outcomes[(int(m.group(1)), m.group(2))].append((status, rep.nodeid.split("::")[-1]))
    if not outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for (num, sub), results in sorted(outcomes.items()):
        ok = all(s == "passed" for s, _ in results)
        terminalreporter.write_line(f"criterion {num}{sub}: {'PASS' if ok else 'FAIL'}")
        for status, name in results:
            values = "; ".join(_METRICS.get(name, []))
            terminalreporter.write_line(f"    {status:7s} {name}" + (f"  [{values}]" if values else ""))
