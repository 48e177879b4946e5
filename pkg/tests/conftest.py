import pytest

from aecomm import ExperimentConfig, harness


@pytest.fixture(scope="session")
def quick_config():
    """Short-budget config for tests that need a working but not fully
    converged model."""
    return ExperimentConfig(steps=1200, seeds=(0,))


@pytest.fixture(scope="session")
def quick_model(quick_config):
    params, _ = harness.train_autoencoder(quick_config, 7.0, 42)
    return params
