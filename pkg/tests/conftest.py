import re

import numpy as np
import pytest

from feynclock.peaks import log_spaced_ks, sweep


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_hermitian(rng, n):
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (a + a.conj().T) / 2


@pytest.fixture(scope="session")
def headline_sweep():
    """20 log-spaced k in [100, 1e4], the regime of the published scaling fits."""
    return sweep(log_spaced_ks(100, 10_000, 20), jobs=1)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(RESULTS, key=lambda s: (int(re.match(r"C(\d+)", s).group(1)), s)):
        terminalreporter.write_line(RESULTS[name])
