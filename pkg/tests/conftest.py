import numpy as np
import pytest

from normpde import Grid, PopulationField


@pytest.fixture
def wall_grid():
    return Grid(-20.0, 20.0, 1001)


@pytest.fixture
def baseline_field(wall_grid):
    return PopulationField.sinusoid(wall_grid, 1.0, 0.01, 0.2)


def gaussian(x, m, s, height=1.0):
    return height * np.exp(-0.5 * ((x - m) / s) ** 2)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(RESULTS):
        title, ok, detail = RESULTS[number]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {number:2d}  {title}: {detail}")
