import os

import pytest

from faultscope.registry import FULLADDER_DSL, fulladder_dpi, fulladder_spec

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")

# the three minimal diagnoses / two minimal conflicts of the full adder
FA_DIAGNOSES = {frozenset({"X1"}), frozenset({"A2", "X2"}), frozenset({"O1", "X2"})}
FA_CONFLICTS = {frozenset({"X1", "X2"}), frozenset({"X1", "A2", "O1"})}


@pytest.fixture(scope="session")
def fa_spec():
    return fulladder_spec()


@pytest.fixture()
def fa_dpi():
    return fulladder_dpi()


@pytest.fixture(scope="session")
def fa_dsl():
    return FULLADDER_DSL


def fixture_path(name: str) -> str:
    return os.path.join(FIXTURES, name)
