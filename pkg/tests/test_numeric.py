import numpy as np
import pytest

from sqw.analytic import ModeSpec, initial_mode, propagate_mode
from sqw.numeric import (
    SplitStepPlan,
    absorber_profile,
    check_aliasing,
    kernel_propagate,
    spectral_power_beyond,
    split_step_propagate,
    split_step_trajectory,
)
from sqw.observables import center_of_mass
from sqw.physics import ComplexField2D, Grid2D, l2_distance
from sqw.utils.errors import AliasingError, GridSizeError, KernelSingularityError


def test_split_step_reproduces_the_analytic_mode(grid128):
    mode, A, zeta = ModeSpec.hg(1, 0), 0.4, 1.0
    plan = SplitStepPlan(grid=grid128, A=A)
    numeric = split_step_propagate(initial_mode(mode, grid128), plan, zeta)
    assert numeric.zeta == pytest.approx(zeta)
    assert numeric.A == A
    assert l2_distance(propagate_mode(mode, A, zeta, grid128), numeric, align_phase=True) < 1e-6


def test_split_step_conserves_norm_without_absorber(grid128):
    plan = SplitStepPlan(grid=grid128, A=-0.3, steps_per_rayleigh=32)
    out = split_step_propagate(initial_mode(ModeSpec.lg(1, 0), grid128), plan, 0.75)
    assert out.norm_squared() == pytest.approx(1.0, abs=1e-12)
    assert out.normalized


def test_split_step_backwards_returns_to_start(grid128):
    plan = SplitStepPlan(grid=grid128, A=0.2)
    start = initial_mode(ModeSpec.hg(0, 1), grid128)
    there = split_step_propagate(start, plan, 0.5)
    back = split_step_propagate(there, plan, -0.5)
    assert l2_distance(start, back) < 1e-10


def test_trajectory_visits_each_plane(grid128):
    mode, A = ModeSpec.hg(0, 0), 0.3
    plan = SplitStepPlan(grid=grid128, A=A)
    fields = split_step_trajectory(initial_mode(mode, grid128), plan, [0.0, 0.5, 1.0])
    assert [f.zeta for f in fields] == pytest.approx([0.0, 0.5, 1.0])
    for field in fields[1:]:
        assert l2_distance(propagate_mode(mode, A, field.zeta, grid128), field, align_phase=True) < 1e-6


def test_step_count():
    plan = SplitStepPlan(grid=Grid2D(nx=16, ny=16, extent_x=4.0, extent_y=4.0), steps_per_rayleigh=64)
    assert plan.step_count(1.0) == 64
    assert plan.step_count(-0.5) == 32
    assert plan.step_count(1e-4) == 1


def test_aliasing_guard_rejects_fast_fields(grid64):
    X, _ = grid64.mesh
    start = initial_mode(ModeSpec.hg(0, 0), grid64)
    fast = start.replace(values=start.values * np.exp(0.9j * grid64.nyquist_x * X))
    with pytest.raises(AliasingError):
        split_step_propagate(fast, SplitStepPlan(grid=grid64), 0.1)


def test_aliasing_guard_sees_the_momentum_drift(grid64):
    start = initial_mode(ModeSpec.hg(0, 0), grid64)
    assert spectral_power_beyond(start.values, grid64) < 1e-10
    check_aliasing(start, 0.0, 1.0)
    with pytest.raises(AliasingError):
        check_aliasing(start, 5.0, 1.5)


def test_split_step_rejects_bad_requests(grid64):
    start = initial_mode(ModeSpec.hg(0, 0), grid64)
    with pytest.raises(ValueError):
        split_step_propagate(start, SplitStepPlan(grid=grid64), 0.0)
    other = Grid2D(nx=64, ny=64, extent_x=7.0, extent_y=7.0)
    with pytest.raises(ValueError):
        split_step_propagate(start, SplitStepPlan(grid=other), 0.5)


def test_absorber_profile_shape(grid64):
    plan = SplitStepPlan(grid=grid64, absorber_width=0.2, absorber_strength=10.0)
    profile = absorber_profile(plan)
    centre = profile[grid64.ny // 2, grid64.nx // 2]
    assert centre == 0.0
    assert profile.max() <= 20.0
    assert profile[0, 0] > 15.0
    assert np.all(absorber_profile(SplitStepPlan(grid=grid64)) == 0.0)


def test_absorber_removes_density_leaving_the_grid():
    grid = Grid2D(nx=64, ny=64, extent_x=4.0, extent_y=4.0)
    plan = SplitStepPlan(grid=grid, A=0.0, absorber_width=0.2)
    start = initial_mode(ModeSpec.hg(0, 0), grid)
    out = split_step_propagate(start, plan, 3.0)
    assert out.norm_squared() < 0.9
    assert not out.normalized


def test_kernel_quadrature_matches_the_analytic_mode():
    grid = Grid2D(nx=128, ny=128, extent_x=6.0, extent_y=6.0)
    mode, A, zeta = ModeSpec.hg(0, 0), 0.4, 1.0
    numeric = kernel_propagate(initial_mode(mode, grid), A, zeta)
    assert l2_distance(propagate_mode(mode, A, zeta, grid), numeric) < 1e-5


def test_kernel_guards():
    big = Grid2D(nx=512, ny=8, extent_x=4.0, extent_y=4.0)
    empty = ComplexField2D(grid=big, values=np.zeros(big.shape))
    with pytest.raises(GridSizeError):
        kernel_propagate(empty, 0.1, 1.0)
    small = Grid2D(nx=16, ny=16, extent_x=4.0, extent_y=4.0)
    with pytest.raises(KernelSingularityError):
        kernel_propagate(ComplexField2D(grid=small, values=np.zeros(small.shape)), 0.1, 1e-4)


def test_split_steps_compose(grid128):
    plan = SplitStepPlan(grid=grid128, A=0.3)
    start = initial_mode(ModeSpec.lg(1, 0, offset_x=0.4), grid128)
    twice = split_step_propagate(split_step_propagate(start, plan, 0.25), plan, 0.5)
    once = split_step_propagate(start, plan, 0.75)
    assert twice.zeta == pytest.approx(once.zeta)
    assert l2_distance(once, twice) < 1e-10


def test_split_step_centroid_falls_classically(grid128):
    A, x0 = 0.4, 0.5
    zetas = [0.0, 0.25, 0.5, 0.75, 1.0]
    plan = SplitStepPlan(grid=grid128, A=A)
    fields = split_step_trajectory(initial_mode(ModeSpec.hg(1, 0, offset_x=x0), grid128), plan, zetas)
    centroids = np.array([center_of_mass(f)[0] for f in fields])
    expected = x0 - 0.5 * A * np.asarray(zetas) ** 2
    np.testing.assert_allclose(centroids, expected, atol=grid128.dx / 10.0)
    curvature = np.polyfit(zetas, centroids, 2)[0]
    assert curvature == pytest.approx(-0.5 * A, rel=1e-3)


def test_kernel_propagation_is_linear():
    grid = Grid2D(nx=32, ny=32, extent_x=5.0, extent_y=5.0)
    f = initial_mode(ModeSpec.hg(0, 0), grid)
    g = initial_mode(ModeSpec.hg(1, 2, offset_x=0.3), grid)
    a, b = 0.6 - 0.2j, -1.1j
    mixed = f.replace(values=a * f.values + b * g.values, normalized=False)
    A, zeta = 0.3, 0.7
    combined = kernel_propagate(mixed, A, zeta).values
    separate = a * kernel_propagate(f, A, zeta).values + b * kernel_propagate(g, A, zeta).values
    np.testing.assert_allclose(combined, separate, rtol=0.0, atol=1e-12 * np.abs(separate).max())
