import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "geomkit",
    deadline=None,
    max_examples=25,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("geomkit")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    results = {}
    for name, mod in list(sys.modules.items()):
        if name.endswith("test_acceptance") and hasattr(mod, "RESULTS"):
            results.update(mod.RESULTS)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        terminalreporter.write_line(results[n].line())
    passed = sum(r.passed for r in results.values())
    terminalreporter.write_line(f"{passed}/{len(results)} criteria passed")
