import numpy as np
import pytest

import robust_arma as ra
from robust_arma.core import ETA_IDENTITY, ETA_ZERO, RHO_QUADRATIC


@pytest.fixture(scope="session")
def eff():
    return ra.make_rho_family(ra.C1_EFF)


@pytest.fixture(scope="session")
def rob():
    return ra.make_rho_family(ra.C1_ROB)


@pytest.fixture(scope="session")
def identity_family():
    return ra.make_rho_family(ra.C1_EFF, eta_kind=ETA_IDENTITY)


@pytest.fixture(scope="session")
def quadratic_family():
    return ra.make_rho_family(1.0, rho_kind=RHO_QUADRATIC, eta_kind=ETA_IDENTITY)


@pytest.fixture(scope="session")
def zero_eta_family():
    return ra.make_rho_family(ra.C1_EFF, eta_kind=ETA_ZERO)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for k in sorted(results):
            terminalreporter.write_line(results[k])
