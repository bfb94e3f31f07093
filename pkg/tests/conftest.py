import time

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from eapolar.channel import make_builtin
from eapolar.cqsynth import amplitude_channel
from eapolar.polar import FORWARD, synthesize_all

settings.register_profile(
    "repo", deadline=None, derandomize=True, max_examples=25,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture(scope="session")
def ad025():
    return make_builtin({"name": "amplitude_damping", "params": {"gamma": 0.25}})


@pytest.fixture(scope="session")
def ad025_timed_tables(ad025):
    """Forward amplitude tables of amplitude damping 0.25 at N = 2, 4, 8 with build times (s)."""
    w = amplitude_channel(ad025)
    tables, seconds = {}, {}
    for N in (2, 4, 8):
        start = time.perf_counter()
        tables[N] = synthesize_all(w, N, FORWARD)
        seconds[N] = time.perf_counter() - start
    return tables, seconds


@pytest.fixture(scope="session")
def ad025_amp_tables(ad025_timed_tables):
    return ad025_timed_tables[0]
