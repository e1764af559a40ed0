import numpy as np
import pytest

from springlattice import LatticeSpec, PoreShape, build_lattice


def rel_err(actual, expected, floor=0.0):
    """Entrywise relative error with a floor against near-zero denominators."""
    actual = np.asarray(actual, dtype=float)
    expected = np.asarray(expected, dtype=float)
    scale = np.maximum(np.maximum(np.abs(actual), np.abs(expected)), floor)
    scale = np.where(scale == 0.0, 1.0, scale)
    return np.abs(actual - expected) / scale


@pytest.fixture
def unit_shape():
    return PoreShape(xi=0.0, phi0=0.5, l0=1.0)


@pytest.fixture
def small_lattice(unit_shape):
    return build_lattice(LatticeSpec(rows=4, cols=4, shape=unit_shape, density=1.0))
