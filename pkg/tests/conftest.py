import pytest

import helpers


@pytest.fixture
def fig():
    return helpers.fig_tree()


@pytest.fixture
def deep():
    return helpers.deep_tree()
