"""Shared test configuration.

Puts this directory on ``sys.path`` so the self-contained reference
implementations living next to the tests (``rabi.py``) can be imported
as plain modules, and provides a couple of fixtures reused across files.
"""

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from dickeg import ModelParams  # noqa: E402


@pytest.fixture(scope="session")
def p3():
    """The small odd-N workhorse instance."""
    return ModelParams(n_qubits=3, delta=0.7, g=0.25)


@pytest.fixture(scope="session")
def p2():
    """The smallest even-N instance (slaved center row)."""
    return ModelParams(n_qubits=2, delta=1.0, g=0.2)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260819)
