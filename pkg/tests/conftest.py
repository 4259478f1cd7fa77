"""Shared test fixtures: the bundled phone model and golden arrays."""

from pathlib import Path

import pytest

from clatool.catalog import load_catalog_model
from clatool.model import Interaction
from clatool.parsers import load_array

FIXTURES_DIR = Path(__file__).parent / "fixtures"


def paper_interaction(*pairs):
    """Interaction from (factor, value) pairs with factors numbered from 1."""
    return Interaction(tuple((f - 1, v) for f, v in pairs))


@pytest.fixture(scope="session")
def fixtures_dir():
    return FIXTURES_DIR


@pytest.fixture(scope="session")
def phone():
    return load_catalog_model("phone")


@pytest.fixture(scope="session")
def phone_unconstrained(phone):
    return phone.without_constraints()


@pytest.fixture
def ix():
    return paper_interaction


@pytest.fixture
def fig(phone):
    """Load a golden array by name, e.g. fig("fig4")."""

    def _load(name, model=None):
        return load_array(FIXTURES_DIR / f"{name}.array", model or phone)

    return _load
