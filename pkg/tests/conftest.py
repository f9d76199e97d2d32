import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from graph_concordance import Graph  # noqa: E402


@pytest.fixture
def matching():
    """Perfect matching {1-2, 3-4} (ids 0..3)."""
    return Graph(4, [(0, 1), (2, 3)])


@pytest.fixture
def path4():
    """Path 1-2-3-4 (ids 0..3)."""
    return Graph(4, [(0, 1), (1, 2), (2, 3)])


@pytest.fixture
def cycle4():
    return Graph(4, [(0, 1), (1, 2), (2, 3), (3, 0)])


def random_graph(rng, n, p):
    """Small Bernoulli graph that passes construction checks."""
    while True:
        iu, ju = np.triu_indices(n, 1)
        keep = rng.random(len(iu)) < p
        try:
            return Graph(n, np.stack([iu[keep], ju[keep]], axis=1))
        except Exception:
            continue


_criteria = []


def pytest_runtest_logreport(report):
    props = dict(report.user_properties)
    if "criterion" not in props:
        return
    if report.when == "call" or report.failed:
        _criteria.append((props["criterion"], report.outcome, props.get("measured", "")))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome, measured in sorted(_criteria, key=lambda c: int(c[0].split()[0])):
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{status}  criterion {name}  [{measured}]")
