import pytest

from deeprff.plugins import load_default_plugins


@pytest.fixture(autouse=True, scope='session')
def core_plugins():
    yield load_default_plugins()
