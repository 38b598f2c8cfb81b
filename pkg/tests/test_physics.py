import math

import numpy as np
import pytest
from pydantic import ValidationError

from sqw.analytic import classical_centroid
from sqw.consts import HBAR, NEUTRON_MASS, PLANCK_H
from sqw.physics import (
    ComplexField2D,
    Grid2D,
    ParticleBeam,
    PotentialSpec,
    classical_trajectory_si,
    inner_product,
    l2_distance,
    nondimensionalize,
)
from sqw.utils.errors import NormalizationError


def test_beam_scales(neutron):
    assert neutron.p0 == pytest.approx(PLANCK_H / 2e-10, rel=1e-15)
    assert neutron.rayleigh_range == pytest.approx(neutron.p0 * 1e-10 / (2.0 * HBAR), rel=1e-14)
    assert neutron.k0 == pytest.approx(2.0 * neutron.rayleigh_range / neutron.w0, rel=1e-14)
    assert neutron.de_broglie_wavelength == pytest.approx(2e-10, rel=1e-14)


def test_beam_rejects_non_positive_values():
    with pytest.raises(ValidationError):
        ParticleBeam(mass=NEUTRON_MASS, p0=-1.0, w0=1e-5)
    with pytest.raises(ValueError):
        ParticleBeam.from_wavelength(NEUTRON_MASS, 0.0, 1e-5)


def test_reduced_strength_round_trip(neutron):
    alpha = 3.2e-26
    reduced = nondimensionalize(neutron, alpha)
    back = PotentialSpec.from_reduced(reduced.A, neutron)
    assert back.alpha == pytest.approx(alpha, rel=1e-12)
    assert nondimensionalize(neutron, 0.0).A == 0.0


def test_nondimensionalize_rejects_non_finite(neutron):
    with pytest.raises(ValueError):
        nondimensionalize(neutron, math.inf)


def test_si_trajectory_matches_reduced_parabola(neutron):
    alpha = 1e-26
    A = nondimensionalize(neutron, alpha).A
    z = np.linspace(0.0, 3.0 * neutron.rayleigh_range, 7)
    reduced = neutron.x_from_reduced(classical_centroid(A, neutron.zeta_from_z(z)))
    np.testing.assert_allclose(classical_trajectory_si(neutron, alpha, z), reduced, rtol=1e-12, atol=0.0)


def test_grid_layout():
    grid = Grid2D(nx=64, ny=32, extent_x=4.0, extent_y=2.0)
    assert grid.shape == (32, 64)
    assert grid.x[0] == pytest.approx(-grid.x[-1])
    assert grid.dx == pytest.approx(0.125)
    assert grid.nyquist_x == pytest.approx(math.pi / 0.125)
    X, Y = grid.mesh
    assert X.shape == grid.shape and Y.shape == grid.shape


def test_grid_rejects_odd_counts():
    with pytest.raises(ValidationError):
        Grid2D(nx=63, ny=64, extent_x=4.0, extent_y=4.0)


def test_field_shape_must_match_grid(grid64):
    with pytest.raises(ValueError):
        ComplexField2D(grid=grid64, values=np.zeros((10, 10)))


def test_normalize_empty_field(grid64):
    with pytest.raises(NormalizationError):
        ComplexField2D(grid=grid64, values=np.zeros(grid64.shape)).normalize()


def test_l2_distance_aligns_global_phase(grid64):
    X, Y = grid64.mesh
    base = ComplexField2D(grid=grid64, values=np.exp(-(X**2 + Y**2))).normalize()
    rotated = base.replace(values=base.values * np.exp(0.7j))
    assert l2_distance(base, rotated, align_phase=True) < 1e-12
    assert l2_distance(base, rotated) == pytest.approx(2.0 * math.sin(0.35), rel=1e-12)
    assert abs(inner_product(base, base) - 1.0) < 1e-12
