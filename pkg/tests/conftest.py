import math
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from adaptphase import FixedM, RngStream, make_schedule, run_episode  # noqa: E402
from adaptphase.measurement import IDEAL  # noqa: E402


@pytest.fixture
def deterministic_pass():
    """Posterior trace of the phi = 0, ideal-readout episode."""

    def run(N, M):
        return run_episode(0.0, make_schedule(N, FixedM(M)), IDEAL, RngStream(0))

    return run


@pytest.fixture
def cos_posterior():
    """Posterior proportional to 1 + cos(phi - shift) from a single ideal update."""
    from adaptphase import MeasurementSettings, bayes_update, flat_prior

    def make(shift=0.0):
        return bayes_update(flat_prior(), MeasurementSettings(1, -shift), 1, IDEAL)

    return make


TWO_PI = 2 * math.pi


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        terminalreporter.write_line(results[n])
