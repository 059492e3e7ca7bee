"""Shared fixtures: both group directories on sys.path, seeded generators"""

import sys
from pathlib import Path

import numpy as np
import pytest

ROOT = Path(__file__).resolve().parent.parent
for group in ('geometry_group', 'verify_group'):
    path = str(ROOT / group)
    if path not in sys.path:
        sys.path.insert(0, path)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def repo_root():
    return ROOT
