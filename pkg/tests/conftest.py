# tests/conftest.py
import numpy as np
import pytest

from app.core.logging import configure_logging

configure_logging(level="WARNING")


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240917)
