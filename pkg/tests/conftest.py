import os
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings

from cartan_tiler import geometry as geo
from cartan_tiler.covering import CoveringSpec, cartan_from_tiling
from cartan_tiler.tiling import model_tiling

settings.register_profile("repo", derandomize=True, deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "repo"))

# filled by tests/test_acceptance.py, echoed after the run so the verdicts
# show up even when pytest captures stdout
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def models():
    """Model tilings with their one-member specs and verified coverings."""
    out = {}
    for kind in ("square", "annulus", "square_pair"):
        t = model_tiling(kind, 1)
        spec = CoveringSpec((geo.offset(geo.union(*t.regions), 1),))
        ts = [Fraction(k, 4) for k in range(5)]
        out[kind] = (t, spec, cartan_from_tiling(t, spec, t_samples=ts))
    return out
