"""Shared fixtures; the expensive tabulated table is built once per session."""

import numpy as np
import pytest

from shellbound import potentials


@pytest.fixture(scope="session")
def tabulated_gaussian_2d():
    """FFT-table version of gaussian_well(c=1, sigma=1) in two dimensions.

    Box edge 128 with 1024 samples puts the resolved band at ~12.6 and
    the dual-lattice spacing at ~0.049, fine enough for the 1e-6
    closed-form comparison.
    """
    samples, edge = 1024, 128.0
    step = edge / samples
    axis = (np.arange(samples) - samples // 2) * step
    x, y = np.meshgrid(axis, axis, indexing="ij")
    return potentials.tabulated(-np.exp(-(x**2 + y**2) / 2.0), edge)
