import sys
import warnings
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from peripheral.algebra import extract_structure  # noqa: E402
from peripheral.channel import kraus_to_superop  # noqa: E402
from peripheral.models import collective_noise  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture(scope="session")
def collective():
    """Superoperators and structures of collective noise on 3 and 4 qubits."""
    out = {}
    for n in (3, 4):
        t = kraus_to_superop(collective_noise(n))
        out[n] = (t, extract_structure(t))
    return out


@pytest.fixture(autouse=True)
def _quiet_peripheral_warnings():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", category=RuntimeWarning)
        yield


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
