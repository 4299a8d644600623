import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from phaselab import (PhysicalParams, ValidationError, check_resolvability,
                      gaussian_wavepacket, init_gaussian, make_grid, norm,
                      purity)

G = make_grid(-8, 8, 128, -8, 8, 128)
PARAMS = PhysicalParams(hbar=1.0, mass=1.0)


def test_gaussian_normalized():
    d = init_gaussian(G, 0.5, -0.25, 1.0, 0.5)
    assert norm(d) == pytest.approx(1.0, abs=1e-10)
    assert d.time == 0.0


def test_minimum_uncertainty_purity():
    d = init_gaussian(G, 0.0, 0.0, 1.0, 0.5)  # sigma_x*sigma_p = hbar/2
    assert purity(d, PARAMS) == pytest.approx(1.0, abs=1e-6)


def test_centered_gaussian_point_symmetric():
    d = init_gaussian(G, 0.0, 0.0, 1.0, 1.0)
    v = d.values
    flipped = v[::-1, ::-1]
    # (x, p) -> (-x, -p) maps lattice point j -> n - j, which is a roll of the flip
    flipped = np.roll(np.roll(flipped, 1, axis=0), 1, axis=1)
    assert np.array_equal(v, flipped)


def test_too_wide_rejected():
    with pytest.raises(ValidationError):
        init_gaussian(G, 0.0, 0.0, 5.0, 1.0)
    with pytest.raises(ValidationError):
        init_gaussian(G, 0.0, 0.0, 1.0, 5.0)


def test_resolvability_check():
    fine = PhysicalParams(hbar=1e-3, mass=1.0)
    with pytest.raises(ValidationError):
        check_resolvability(G, fine)
    check_resolvability(G, PARAMS)


def test_params_validation():
    with pytest.raises(ValidationError):
        PhysicalParams(hbar=0.0)
    with pytest.raises(ValidationError):
        PhysicalParams(hbar=1.0, mass=-1.0)


def test_wavepacket_normalized():
    psi = gaussian_wavepacket(G, PARAMS, 1.0, 2.0, 0.7)
    assert psi.norm() == pytest.approx(1.0, abs=1e-9)
    assert np.all(np.isfinite(psi.values.view(float)))


def test_boundary_mass_fraction():
    d = init_gaussian(G, 0.0, 0.0, 0.5, 0.5)
    assert d.boundary_mass_fraction() < 1e-8
    edge = init_gaussian(G, 7.0, 0.0, 0.5, 0.5)
    assert edge.boundary_mass_fraction() > 1e-8


@settings(max_examples=25, deadline=None)
@given(x0=st.floats(-2, 2), p0=st.floats(-2, 2),
       sx=st.floats(0.2, 3.9), sp=st.floats(0.2, 3.9))
def test_gaussian_norm_property(x0, p0, sx, sp):
    d = init_gaussian(G, x0, p0, sx, sp)
    assert norm(d) == pytest.approx(1.0, abs=1e-10)
