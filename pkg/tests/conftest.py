from __future__ import annotations

import numpy as np
import pytest

from satnc.constellation import ConstellationSpec, range_series
from satnc.dynamics import Scenario
from satnc.graph import MultiGraph
from satnc.linkbudget import LinkParams, multigraph_series


def random_multigraph(rng: np.random.Generator, n: int, density: float = 0.35, max_mult: int = 3) -> MultiGraph:
    m = rng.integers(1, max_mult + 1, size=(n, n)) * (rng.random((n, n)) < density)
    np.fill_diagonal(m, 0)
    return MultiGraph(m)


@pytest.fixture(scope="session")
def default_ranges():
    return range_series(ConstellationSpec())


@pytest.fixture(scope="session")
def default_graphs(default_ranges):
    return multigraph_series(default_ranges.ranges, LinkParams())


@pytest.fixture(scope="session")
def default_scenario(default_graphs):
    # default source satellite 34 and sinks {6, 13, 15}; 0-based internally
    return Scenario(default_graphs, 60.0, 33, (5, 12, 14))


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(RESULTS):
        ok, text = RESULTS[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {text}")
