import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from smoothfrechet import PiecewiseCurve

settings.register_profile(
    "default", deadline=None, max_examples=25,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large])
settings.load_profile("default")


@pytest.fixture
def gap_pair():
    """Horizontal unit segments one apart."""
    return (PiecewiseCurve.polyline([[0.0, 0.0], [1.0, 0.0]]),
            PiecewiseCurve.polyline([[0.0, 1.0], [1.0, 1.0]]))


@pytest.fixture
def parabola_pair():
    """Unit segment against the quadratic ``(s, 0.5 + 2 (s - 0.5)^2)``."""
    return (PiecewiseCurve.polyline([[0.0, 0.0], [1.0, 0.0]]),
            PiecewiseCurve([[[0.0, 1.0], [0.5, 0.0], [1.0, 1.0]]]))


def pytest_terminal_summary(terminalreporter):
    from helpers import ACCEPTANCE

    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
