import math

import numpy as np
import pytest
import sympy as sp

from sqw.analytic import ModeSpec, initial_mode, mode_field
from sqw.consts import NEUTRON_MASS, PLANCK_H, STANDARD_GRAVITY
from sqw.interfere import (
    PhaseElement,
    apply_phase_element,
    cow_phase,
    fringe_metrics,
    grating_interferometer,
    grating_phase,
    grating_phase_si,
    kick_shear,
    ring_radius,
    vortex_interfere,
)
from sqw.numeric import SplitStepPlan, split_step_propagate
from sqw.physics import ComplexField2D, Grid2D, ParticleBeam, l2_distance, nondimensionalize
from sqw.utils.errors import AliasingError, GridExitError, NoDominantPeakError, OverlapError


def _wrap(angle: float) -> float:
    return (angle + math.pi) % (2.0 * math.pi) - math.pi


def _cosine_cut(spacing: float, phase: float, contrast: float = 0.8) -> np.ndarray:
    x = np.linspace(-4.0, 4.0, 513)
    return np.column_stack([x, 1.0 + contrast * np.cos(2.0 * math.pi * x / spacing + phase)])


def test_fringe_metrics_on_a_clean_cosine():
    gram = fringe_metrics(_cosine_cut(0.8, 0.6), require_peak=True)
    assert gram.dominant_peak
    assert gram.fringe_spacing == pytest.approx(0.8, rel=1e-3)
    assert gram.phase_shift == pytest.approx(0.6, abs=5e-3)
    assert gram.visibility == pytest.approx(0.8, abs=5e-3)


def test_fringe_phase_is_measured_from_the_reference_point():
    gram = fringe_metrics(_cosine_cut(0.8, 0.6), x_ref=0.2)
    expected = _wrap(0.6 + 2.0 * math.pi * 0.2 / 0.8)
    assert _wrap(gram.phase_shift - expected) == pytest.approx(0.0, abs=5e-3)


def test_fringe_metrics_without_a_dominant_frequency():
    rng = np.random.default_rng(7)
    x = np.linspace(0.0, 10.0, 512)
    noise = np.column_stack([x, 1.0 + rng.normal(scale=0.1, size=x.size)])
    gram = fringe_metrics(noise)
    assert not gram.dominant_peak
    assert gram.fringe_spacing is None and gram.phase_shift is None
    with pytest.raises(NoDominantPeakError):
        fringe_metrics(noise, require_peak=True)


def test_fringe_metrics_input_checks():
    with pytest.raises(ValueError):
        fringe_metrics(_cosine_cut(0.8, 0.0)[:20])
    bent = _cosine_cut(0.8, 0.0)
    bent[:, 0] = bent[:, 0] ** 3
    with pytest.raises(ValueError):
        fringe_metrics(bent)


def test_phase_element_guards(grid64):
    field = initial_mode(ModeSpec.hg(0, 0), grid64)
    with pytest.raises(ValueError):
        apply_phase_element(field, PhaseElement(k_T=1.0, zeta_position=0.5))
    coarse = Grid2D(nx=32, ny=32, extent_x=8.0, extent_y=8.0)
    with pytest.raises(AliasingError):
        apply_phase_element(ComplexField2D(grid=coarse, values=np.zeros(coarse.shape)), PhaseElement(k_T=6.0))
    assert apply_phase_element(field, PhaseElement(k_T=0.0)) is field


def test_kick_shear_relates_kicked_and_shifted_propagation(grid128):
    k_T, A, zeta = 2.0, 0.3, 0.5
    start = initial_mode(ModeSpec.hg(0, 0), grid128)
    kicked = apply_phase_element(start, PhaseElement(k_T=k_T))
    evolved = split_step_propagate(kicked, SplitStepPlan(grid=grid128, A=A), zeta)
    shift, phase = kick_shear(k_T, zeta, A)
    X, Y = grid128.mesh
    expected = np.exp(1j * (phase + k_T * X)) * mode_field(ModeSpec.hg(0, 0), X - shift, Y, A, zeta)
    assert l2_distance(evolved, evolved.replace(values=expected)) < 1e-8


def test_grating_phase_laws(neutron):
    assert grating_phase(4.0, 0.2, 1.0) == pytest.approx(0.4)
    assert grating_phase(4.0, -0.2, 2.0) == pytest.approx(-1.6)
    p_T = 3.0 * PLANCK_H / 1e-6
    alpha = 2e-26
    z = 0.4
    expected = p_T * NEUTRON_MASS * alpha * z**2 / (2.0 * neutron.hbar * neutron.p0**2)
    assert grating_phase_si(p_T, neutron, alpha, z) == pytest.approx(expected, rel=1e-14)


def test_cow_phase_agrees_with_the_grating_law():
    wavelength, d, theta, phi = 1.8e-10, 0.035, 0.3, 0.7
    p0 = PLANCK_H / wavelength
    beam = ParticleBeam(mass=NEUTRON_MASS, p0=p0, w0=1e-4)
    alpha = NEUTRON_MASS * STANDARD_GRAVITY * math.sin(phi)
    reference = cow_phase(wavelength, STANDARD_GRAVITY, NEUTRON_MASS, d, 0.0, theta, phi)
    assert grating_phase_si(p0 * math.tan(theta), beam, alpha, 2.0 * d) == pytest.approx(reference, rel=1e-12)
    with pytest.raises(ValueError):
        cow_phase(wavelength, STANDARD_GRAVITY, NEUTRON_MASS, d, 0.0, 0.5 * math.pi, phi)
    with pytest.raises(ValueError):
        cow_phase(wavelength, STANDARD_GRAVITY, NEUTRON_MASS, -d, 0.0, theta, phi)


def test_cow_substitution_symbolically():
    lam, g, m, d, theta, phi, h = sp.symbols("lambda g m d theta phi h", positive=True)
    p0 = h / lam
    hbar = h / (2 * sp.pi)
    p_T, alpha, z = p0 * sp.tan(theta), m * g * sp.sin(phi), 2 * d
    grating = p_T * m * alpha * z**2 / (2 * hbar * p0**2)
    cow = 4 * sp.pi * lam * g * m**2 * d**2 * sp.tan(theta) * sp.sin(phi) / h**2
    assert sp.simplify(grating - cow) == 0


def test_reduced_grating_phase_is_the_si_phase_symbolically():
    p_T, p0, w0, hbar, m, alpha, z = sp.symbols("p_T p0 w0 hbar m alpha z", positive=True)
    z_r = p0 * w0**2 / (2 * hbar)
    k_T = p_T * w0 / hbar
    A = alpha * m * z_r**2 / (p0**2 * w0)
    reduced = k_T * A * (z / z_r) ** 2 / 2
    assert sp.simplify(reduced - p_T * m * alpha * z**2 / (2 * hbar * p0**2)) == 0


def test_reduced_and_si_grating_phases_agree(neutron):
    p_T, alpha, z = 2.0 * PLANCK_H / 1e-6, 3e-27, 0.25
    A = nondimensionalize(neutron, alpha).A
    k_T = p_T * neutron.w0 / neutron.hbar
    zeta = neutron.zeta_from_z(z)
    assert grating_phase(k_T, A, zeta) == pytest.approx(grating_phase_si(p_T, neutron, alpha, z), rel=1e-12)


@pytest.mark.parametrize("A", [0.2, -0.1])
def test_grating_interferometer_measures_the_predicted_phase(A):
    grid = Grid2D(nx=256, ny=256, extent_x=8.0, extent_y=8.0)
    result = grating_interferometer(A, 4.0, 1.0, grid)
    assert result.predicted_phase == pytest.approx(grating_phase(4.0, A, 1.0))
    assert result.measured_phase == pytest.approx(result.predicted_phase, abs=5e-3)
    assert result.density_loss < 1e-3
    assert result.interferogram.visibility > 0.9
    assert result.predicted_phase_si is None


def test_grating_interferometer_reports_lost_density():
    grid = Grid2D(nx=128, ny=128, extent_x=2.0, extent_y=2.0)
    with pytest.raises(GridExitError):
        grating_interferometer(0.0, 4.0, 1.0, grid)


def test_ring_radius():
    assert ring_radius(2) == pytest.approx(1.0)
    assert ring_radius(-8) == pytest.approx(2.0)
    # inner ring of LG(1,1) sits where 2u^2 - 5u + 1 = 0, u = r^2
    assert ring_radius(1, 1) == pytest.approx(math.sqrt((5.0 - math.sqrt(17.0)) / 4.0), abs=1e-3)
    with pytest.raises(ValueError):
        ring_radius(1, -1)


def _vortex_grid(ell: int, separation: float, zeta: float) -> Grid2D:
    reach = separation + (ring_radius(ell) + 3.0) * math.sqrt(1.0 + zeta**2)
    return Grid2D(nx=256, ny=256, extent_x=reach, extent_y=reach)


def test_vortex_pair_fringe_spacing():
    ell, zeta = 1, 20.0
    d = 10.0 * ring_radius(ell)
    result = vortex_interfere(ell, 0, d, 0.0, zeta, _vortex_grid(ell, d, zeta))
    gram = result.interferogram
    assert gram.dominant_peak
    curvature_spacing = math.pi * (1.0 + zeta**2) / (2.0 * d * zeta)
    assert gram.fringe_spacing == pytest.approx(curvature_spacing, rel=0.15)
    assert result.cut_y != 0.0
    assert result.field.norm_squared() == pytest.approx(1.0)
    assert result.modes[0].first == ell and result.modes[1].first == -ell


def test_vortex_frames_differ_by_the_classical_shift():
    ell, zeta, A = 1, 20.0, 0.002
    d = 10.0 * ring_radius(ell)
    grid = _vortex_grid(ell, d, zeta)
    lab = vortex_interfere(ell, 0, d, A, zeta, grid, frame="lab").interferogram
    moving = vortex_interfere(ell, 0, d, A, zeta, grid, frame="comoving").interferogram
    still = vortex_interfere(ell, 0, d, 0.0, zeta, grid, frame="comoving").interferogram
    drop = 0.5 * A * zeta**2
    assert lab.fringe_spacing == pytest.approx(moving.fringe_spacing)
    expected = 2.0 * math.pi * drop / lab.fringe_spacing
    assert _wrap(lab.phase_shift - moving.phase_shift - expected) == pytest.approx(0.0, abs=1e-9)
    assert _wrap(moving.phase_shift - still.phase_shift) == pytest.approx(0.0, abs=0.2)


def test_vortex_beams_that_never_meet():
    grid = Grid2D(nx=128, ny=128, extent_x=20.0, extent_y=20.0)
    with pytest.raises(OverlapError):
        vortex_interfere(1, 0, 10.0, 0.0, 0.5, grid)
    with pytest.raises(ValueError):
        vortex_interfere(1, 0, -1.0, 0.0, 0.5, grid)


def test_grating_phase_grows_linearly_with_the_potential():
    grid = Grid2D(nx=256, ny=256, extent_x=8.0, extent_y=8.0)
    strengths = [0.05, 0.1, 0.2, 0.3, 0.5]
    measured = [grating_interferometer(A, 4.0, 1.0, grid).measured_phase for A in strengths]
    for A, phase in zip(strengths, measured):
        assert phase == pytest.approx(grating_phase(4.0, A, 1.0), rel=1e-2)
    slope, intercept = np.polyfit(strengths, measured, 1)
    assert slope == pytest.approx(2.0, rel=1e-2)
    assert intercept == pytest.approx(0.0, abs=1e-3)


def test_grating_phase_grows_quadratically_with_the_length():
    grid = Grid2D(nx=256, ny=256, extent_x=8.0, extent_y=8.0)
    lengths = [0.5, 1.0, 1.5]
    measured = [grating_interferometer(0.2, 4.0, z, grid).measured_phase for z in lengths]
    np.testing.assert_allclose(measured, [0.1, 0.4, 0.9], rtol=1e-2)


def test_grating_fringes_are_resolved_on_a_coarse_grid():
    grid = Grid2D(nx=256, ny=256, extent_x=10.0, extent_y=10.0)
    gram = grating_interferometer(0.2, 4.0, 1.0, grid).interferogram
    assert gram.samples.shape == (1024, 2)
    assert gram.dominant_peak
    assert gram.fringe_spacing == pytest.approx(math.pi / 4.0, rel=0.05)


def test_vortex_sensitivity_grows_with_the_charge():
    zeta = 20.0
    strengths = [0.0, 0.001, 0.002, 0.003]
    spacings, rates = [], []
    for ell in range(1, 7):
        d = 10.0 * ring_radius(ell)
        grid = _vortex_grid(ell, d, zeta)
        grams = [vortex_interfere(ell, 0, d, A, zeta, grid).interferogram for A in strengths]
        assert all(g.dominant_peak for g in grams)
        phases = np.unwrap([g.phase_shift for g in grams])
        assert np.all(np.diff(phases) > 0.0)
        spacings.append(grams[0].fringe_spacing)
        rates.append(np.polyfit(strengths, phases, 1)[0])
    assert np.all(np.diff(rates) > 0.0)
    exponent = np.polyfit(np.log(np.arange(1, 7)), np.log(spacings), 1)[0]
    assert abs(exponent) == pytest.approx(0.5, abs=0.15)
