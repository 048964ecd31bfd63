import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("qmetro", max_examples=25, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("qmetro")


def random_state(rng, n, real=False):
    from qmetro.fock_core import FockStateN
    c = rng.normal(size=n + 1)
    if not real:
        c = c + 1j * rng.normal(size=n + 1)
    return FockStateN.from_amplitudes(c)


def random_density(rng, dim, rank=None):
    rank = dim if rank is None else rank
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_hermitian(rng, dim):
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (g + g.conj().T) / 2


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
