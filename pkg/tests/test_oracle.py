import numpy as np
import pytest

from springlattice import AnalyticOracle, finite_difference_gradient, sample_features
from conftest import rel_err


def test_zero_at_reference():
    assert AnalyticOracle.bistable().energy([0.0, 0.0, 0.0]) == 0.0


def test_pure_stretch_energy():
    model = AnalyticOracle(k_d=1.0, k_s=0.0, k_t=0.0, c_couple=0.0)
    assert model.energy([0.0, 0.0, 0.1]) == pytest.approx(0.005, rel=1e-12)


def test_mirror_symmetry():
    model = AnalyticOracle.bistable()
    z = sample_features(200, seed=0)
    mirrored = z * np.array([-1.0, -1.0, 1.0])
    assert np.array_equal(model.energy(z), model.energy(mirrored))


def test_swap_symmetry():
    model = AnalyticOracle.bistable()
    z = sample_features(200, seed=1)
    swapped = z[:, [1, 0, 2]]
    assert np.array_equal(model.energy(z), model.energy(swapped))


def test_bounded_below_on_cube():
    model = AnalyticOracle.bistable()
    z = sample_features(20000, seed=2)
    assert model.energy(z).min() > -1e-12


def test_gradient_matches_finite_differences():
    # include the odd coupling term so every coefficient is exercised
    model = AnalyticOracle.bistable(c_couple=0.1)
    z = sample_features(200, seed=3)
    z = z[np.abs(z[:, 2]) > 1e-3][:100]  # stay away from the d = 0 kink
    fd = finite_difference_gradient(model, z, step=1e-6)
    assert rel_err(model.gradient(z), fd, floor=1e-8).max() < 1e-5


def test_coupling_term_breaks_mirror_symmetry():
    model = AnalyticOracle.quadratic(c_couple=0.2)
    z = np.array([0.3, 0.1, 0.1])
    assert model.energy(z) != model.energy(z * np.array([-1.0, -1.0, 1.0]))


def test_gradient_kink_takes_zero_side():
    model = AnalyticOracle.bistable()
    g = model.gradient([0.1, -0.2, 0.0])
    # at d = 0 the compression well is inactive: plain quadratic gradient
    plain = AnalyticOracle(k_d=1.0, k_s=0.5, k_t=0.3, q4=2.0, d_star=0.0)
    expected = plain.gradient([0.1, -0.2, 0.0])
    assert np.allclose(g, expected, atol=1e-15)


def test_two_wells_under_compression():
    model = AnalyticOracle.bistable()
    # fixed strong compression: scan the counter-rotation axis
    t = np.linspace(-1.2, 1.2, 2001)
    z = np.column_stack([t / 2, -t / 2, np.full_like(t, -0.2)])
    e = model.energy(z)
    interior_minima = np.nonzero((e[1:-1] < e[:-2]) & (e[1:-1] < e[2:]))[0]
    assert len(interior_minima) == 2

    z_tension = np.column_stack([t / 2, -t / 2, np.full_like(t, 0.2)])
    e = model.energy(z_tension)
    interior_minima = np.nonzero((e[1:-1] < e[:-2]) & (e[1:-1] < e[2:]))[0]
    assert len(interior_minima) == 1


def test_calibrated_is_identity_for_oracle():
    model = AnalyticOracle.bistable()
    assert model.calibrated().reference_offset == 0.0
