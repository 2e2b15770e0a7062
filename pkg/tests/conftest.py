from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from phbridge.core.tolerance import TolerancePolicy
from phbridge.repositories.systems.repository import encode_any
from tests.builders import lossless_descriptor, scalar_descriptor, scalar_geometric


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def tol():
    return TolerancePolicy()


@pytest.fixture
def scalar_geo():
    return scalar_geometric()


@pytest.fixture
def scalar_desc():
    return scalar_descriptor()


@pytest.fixture
def lossless():
    return lossless_descriptor()


@pytest.fixture
def write_system(tmp_path):
    """Write any domain value as a system file and return its path."""

    def _write(value, name: str = "system.json") -> Path:
        path = tmp_path / name
        path.write_text(encode_any(value).model_dump_json(indent=2))
        return path

    return _write
