import numpy as np
import pytest

from pass_swipt import kernels
from pass_swipt.system import reference_scenario, sample_receivers

BACKENDS = [kernels.fallback] + ([kernels.compiled] if kernels.compiled is not None else [])


@pytest.fixture(params=BACKENDS, ids=lambda m: m.NAME)
def backend(request):
    return request.param


@pytest.fixture
def scenario():
    return reference_scenario()


def random_scenario(seed, **overrides):
    """Reference scenario with receivers dropped uniformly over the region."""
    rng = np.random.default_rng(seed)
    irs = sample_receivers(rng, 2, (10.0, 6.0))
    ers = sample_receivers(rng, 2, (10.0, 6.0))
    return reference_scenario(irs=irs, ers=ers, **overrides)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
