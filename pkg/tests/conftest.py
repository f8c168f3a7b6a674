import math

import numpy as np
import pytest

from majorana_qd import BathParams, ModelParams

CAPTION = dict(eps_d=0.5, eps=0.5, lambda1=0.1, lambda2=0.2)


def random_density(rng, dim=8, rank=None):
    rank = rank or dim
    x = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = x @ x.conj().T
    return rho / np.trace(rho).real


def random_hermitian(rng, dim=8):
    x = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return 0.5 * (x + x.conj().T)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def majorana():
    return ModelParams.majorana(**CAPTION)


@pytest.fixture
def regular():
    return ModelParams.regular(**CAPTION)


@pytest.fixture(params=[math.inf, 1.0], ids=["T0", "beta1"])
def caption_bath(request):
    return BathParams(0.05, 1.0, 10.0, request.param)


# one line per acceptance criterion, echoed after the run
CRITERIA_LINES = []


def pytest_terminal_summary(terminalreporter):
    if CRITERIA_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(CRITERIA_LINES, key=lambda s: int(s.split()[1].rstrip("]"))):
            terminalreporter.write_line(line)
