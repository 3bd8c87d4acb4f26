"""Shared fixtures. Expensive key material is session-scoped."""

import pytest

from openpub.groups import get_context
from openpub.rng import SeededRng


@pytest.fixture(scope="session")
def ctx():
    return get_context()


@pytest.fixture()
def rng():
    return SeededRng(0xC0FFEE)
