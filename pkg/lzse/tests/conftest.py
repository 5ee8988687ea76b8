"""Shared fixtures for the lzse test suite."""

import pytest

from lzse.src.structures.suffix import TextBuffer
from lzse.src.utils.config import get_settings
from lzse.tests.helpers import RUNNING_EXAMPLE


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run slow tests")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: large randomized or exhaustive runs (needs --runslow)")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture(autouse=True)
def fresh_settings():
    """Every test reads the environment anew."""
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def running_text() -> TextBuffer:
    return TextBuffer.from_string(RUNNING_EXAMPLE)
