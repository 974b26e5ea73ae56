"""Shared grids and corpora, built once per session."""

import pytest

from nsnorm import make_grid, random_solenoidal


@pytest.fixture(scope="session")
def grid32():
    return make_grid(32)


@pytest.fixture(scope="session")
def grid16():
    return make_grid(16)


@pytest.fixture(scope="session")
def narrow_corpus(grid32):
    # band limited to |k_axis| <= 3 so every field survives rescaling by 4
    return [random_solenoidal(grid32, k_max=3.0, seed=s) for s in range(10)]
