"""Shared fixtures: default run configuration and the reference ladder."""

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent.parent))

from engine.fit import FitConfig, batch_fit
from engine.spectrum_io import DEFAULT_CONFIG_PATH, RunConfig
from engine.synth import REFERENCE_LADDER, generate_series


@pytest.fixture(scope='session')
def run_config():
    return RunConfig()


@pytest.fixture(scope='session')
def default_config_path():
    return DEFAULT_CONFIG_PATH


@pytest.fixture(scope='session')
def ladder(run_config):
    """Noiseless eleven-trace series from the default configuration."""
    return generate_series(REFERENCE_LADDER, run_config.atom_params(), run_config.cavity_params(),
                           truth=run_config.truth())


@pytest.fixture(scope='session')
def ladder_fits(ladder):
    return batch_fit(ladder, FitConfig())
