"""Shared fixtures. Topologies are immutable, so each size is built once."""

import pytest

from hexswitch.mesh import build_hex_mesh


@pytest.fixture(scope="session")
def mesh1():
    return build_hex_mesh(1, 1)


@pytest.fixture(scope="session")
def mesh2():
    return build_hex_mesh(2, 2)


@pytest.fixture(scope="session")
def mesh4():
    return build_hex_mesh(4, 4)
