import time

import numpy as np
import pytest

from scope_dlo.bench import run_suite, standard_suite
from scope_dlo.geometry import Configuration, DloParams
from scope_dlo.shapes import ShapeSpec, generate_shape


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture(scope="session")
def suite():
    return standard_suite()


SUITE_WALL_TIME = {}
ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def suite_results(suite):
    # one shared run: the expensive part of the test session
    t0 = time.perf_counter()
    results = run_suite(suite, threads=1)
    SUITE_WALL_TIME["s"] = time.perf_counter() - t0
    return results


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def desk_params():
    return DloParams(15, 0.05)


def random_rope(rng, n, ls=0.05, wiggle=0.4):
    """A random polyline with every segment at length ``ls``."""
    heading = np.cumsum(rng.uniform(-wiggle, wiggle, n - 1))
    steps = ls * np.column_stack([np.cos(heading), np.sin(heading)])
    return Configuration(np.vstack([[0.0, 0.0], np.cumsum(steps, axis=0)]))


def shape(kind, n=15, ls=0.05, **kw):
    return generate_shape(ShapeSpec(kind, n, ls, **kw))
