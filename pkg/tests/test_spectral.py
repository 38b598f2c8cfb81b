import math

import numpy as np
import pytest

from sqw.analytic import ModeSpec, propagate_mode
from sqw.physics import Grid2D, l2_distance
from sqw.quadrature import gaussian_half_width, integrate_panels
from sqw.specfun import hermite
from sqw.spectral import (
    analyze,
    build_spectral_grid,
    display_scale,
    eigenstate_x,
    energy_centroid,
    evolve_in_eigenbasis,
    expansion_coeff_x,
    plane_wave_coeff,
    reconstruct,
)
from sqw.utils.errors import SpectralTailError


def _hg_profile(n: int, y: np.ndarray) -> np.ndarray:
    norm = (2.0 / math.pi) ** 0.25 / math.sqrt(2.0**n * math.factorial(n))
    return norm * np.exp(-(y**2)) * hermite(n, math.sqrt(2.0) * y)


def test_airy_eigenbasis_needs_a_potential():
    with pytest.raises(ValueError):
        eigenstate_x(0.5, 0.0, 1.0)
    with pytest.raises(ValueError):
        expansion_coeff_x(0, 0.5, 0.0)


@pytest.mark.parametrize("n", range(4))
@pytest.mark.parametrize("offset", [0.0, 0.7])
def test_plane_wave_coefficients_against_quadrature(n, offset):
    k = np.linspace(-5.0, 5.0, 21)
    half_width = gaussian_half_width(n)

    def integrand(u):
        y = u + offset
        return np.exp(-1j * k[:, None] * y[None, :]) / math.sqrt(2.0 * math.pi) * _hg_profile(n, u)[None, :]

    expected = integrate_panels(integrand, -half_width, half_width)
    np.testing.assert_allclose(plane_wave_coeff(n, k, offset), expected, rtol=0.0, atol=1e-12)


@pytest.mark.parametrize("m", range(4))
@pytest.mark.parametrize("A", [0.3, -0.5])
def test_closed_form_airy_coefficients_match_quadrature(m, A):
    eps = energy_centroid(m, A) + np.linspace(-3.0, 3.0, 13)
    closed = expansion_coeff_x(m, eps, A, method="closed_form")
    quad = expansion_coeff_x(m, eps, A, method="quadrature")
    np.testing.assert_allclose(closed, quad, rtol=0.0, atol=1e-8 * np.abs(quad).max())


@pytest.mark.parametrize("m", range(4))
def test_reversing_the_potential_flips_odd_coefficients(m):
    eps = np.linspace(-2.0, 4.0, 25)
    forward = expansion_coeff_x(m, eps, 0.4, method="closed_form")
    backward = expansion_coeff_x(m, eps, -0.4, method="closed_form")
    np.testing.assert_allclose(backward, (-1) ** m * forward, rtol=0.0, atol=1e-12 * np.abs(forward).max())


def test_coefficients_satisfy_parseval():
    coeffs = analyze(ModeSpec.hg(2, 1), 0.3, zeta_max=1.0)
    assert coeffs.parseval_x()[0] == pytest.approx(1.0, abs=1e-7)
    assert coeffs.parseval_y()[0] == pytest.approx(1.0, abs=1e-7)


def test_energy_centroid_of_the_coefficients():
    A = 0.3
    coeffs = analyze(ModeSpec.hg(1, 0), A, zeta_max=1.0)
    eps = coeffs.grid.epsilon
    mean = np.sum(eps * np.abs(coeffs.c[0]) ** 2) * coeffs.grid.d_epsilon
    assert mean == pytest.approx(energy_centroid(1, A), abs=1e-6)
    assert energy_centroid(1, A, offset=0.5) == pytest.approx(1.05)


@pytest.mark.parametrize("zeta", [0.0, 1.0])
def test_airy_reconstruction_matches_the_analytic_mode(grid128, zeta):
    mode, A = ModeSpec.hg(1, 0), 0.3
    coeffs = analyze(mode, A, grid=grid128, zeta_max=1.0)
    field = reconstruct(coeffs, grid128, zeta=zeta)
    assert field.zeta == pytest.approx(zeta)
    assert l2_distance(propagate_mode(mode, A, zeta, grid128), field, align_phase=True) < 1e-5


def test_plane_wave_route_without_potential(grid128):
    mode = ModeSpec.hg(1, 1)
    coeffs = analyze(mode, 0.0, grid=grid128, zeta_max=1.0)
    assert not coeffs.grid.airy
    field = reconstruct(coeffs, grid128, zeta=0.5)
    assert l2_distance(propagate_mode(mode, 0.0, 0.5, grid128), field, align_phase=True) < 1e-6


def test_lg_mode_through_the_eigenbasis(grid128):
    mode, A = ModeSpec.lg(1, 0), -0.2
    coeffs = analyze(mode, A, grid=grid128, zeta_max=1.0)
    assert len(coeffs.terms) == 2
    field = reconstruct(coeffs, grid128, zeta=0.8)
    assert l2_distance(propagate_mode(mode, A, 0.8, grid128), field, align_phase=True) < 1e-5


def test_reconstruction_outside_the_ghost_free_window(grid128):
    coeffs = analyze(ModeSpec.hg(0, 0), 0.3, grid=grid128, zeta_max=1.0)
    with pytest.raises(SpectralTailError):
        reconstruct(coeffs, grid128, zeta=1.5)
    wide = Grid2D(nx=128, ny=128, extent_x=10.0, extent_y=10.0)
    with pytest.raises(SpectralTailError):
        reconstruct(coeffs, wide)


def test_evolution_and_grid_bookkeeping(grid128):
    mode = ModeSpec.hg(0, 0)
    coeffs = analyze(mode, 0.3, grid=grid128, zeta_max=1.0)
    assert evolve_in_eigenbasis(coeffs, 0.0) is coeffs
    later = evolve_in_eigenbasis(evolve_in_eigenbasis(coeffs, 0.25), 0.25)
    assert later.zeta == pytest.approx(0.5)
    np.testing.assert_allclose(np.abs(later.c), np.abs(coeffs.c))
    other = build_spectral_grid(mode, -0.3, zeta_max=1.0)
    with pytest.raises(ValueError):
        analyze(mode, 0.3, spectral_grid=other)


def test_display_scale():
    assert display_scale(0) == 1.0
    assert display_scale(2) == pytest.approx(1.0 / (2.0 * math.sqrt(2.0)))
