import numpy as np
import pytest

from strikedip.synthetic import generate_synthetic, observatory_scene


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def observatory_sample():
    """The seeded six-face acceptance scene (10^4 points per face)."""
    return generate_synthetic(observatory_scene(seed=0))


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for number in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[number])
