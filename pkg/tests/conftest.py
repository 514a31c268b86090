"""Shared fixtures"""

import numpy as np
import pytest

from app.config.settings import Settings
from app.wavegen.waveforms import make_rng


@pytest.fixture
def run_settings() -> Settings:
    return Settings()


@pytest.fixture
def rng() -> np.random.Generator:
    return make_rng(1234)
