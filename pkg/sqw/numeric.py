"""
Numerical propagators used as independent oracles: a Strang split-step spectral solver and
direct quadrature of the separable propagation kernel.
"""
import math
from typing import Protocol

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from sqw.analytic import kernel_x, kernel_y
from sqw.consts import KERNEL_GRID_CAP, KERNEL_ZETA_MIN, NYQUIST_FRACTION
from sqw.logger import log_debug
from sqw.physics import ComplexField2D, Grid2D
from sqw.utils.errors import AliasingError, GridSizeError, KernelSingularityError

ALIASING_TOLERANCE = 1e-10


class SpectralTransform(Protocol):
    def forward(self, values: np.ndarray) -> np.ndarray: ...

    def inverse(self, values: np.ndarray) -> np.ndarray: ...


class NumpyFFT:
    """Unitary 2D discrete Fourier transform."""

    def forward(self, values: np.ndarray) -> np.ndarray:
        return np.fft.fft2(values, norm="ortho")

    def inverse(self, values: np.ndarray) -> np.ndarray:
        return np.fft.ifft2(values, norm="ortho")


DEFAULT_TRANSFORM = NumpyFFT()


class SplitStepPlan(BaseModel):
    """
    Step density, grid and potential for the split-step solver. ``absorber_width`` is the
    fraction of each half-extent covered by the damping layer (0 disables it).
    """
    model_config = ConfigDict(frozen=True)

    grid: Grid2D
    A: float = Field(default=0.0, allow_inf_nan=False)
    steps_per_rayleigh: int = Field(default=64, ge=16)
    absorber_width: float = Field(default=0.0, ge=0.0, lt=0.5)
    absorber_strength: float = Field(default=20.0, gt=0.0)

    def step_count(self, delta_zeta: float) -> int:
        return max(1, math.ceil(abs(delta_zeta) * self.steps_per_rayleigh - 1e-9))


def _ramp(coord: np.ndarray, extent: float, width: float) -> np.ndarray:
    inner = (1.0 - width) * extent
    depth = np.clip((np.abs(coord) - inner) / (width * extent), 0.0, 1.0)
    return np.sin(0.5 * math.pi * depth) ** 2


def absorber_profile(plan: SplitStepPlan) -> np.ndarray:
    """Damping rate per unit zeta on the grid; zero in the interior."""
    grid = plan.grid
    if plan.absorber_width == 0.0:
        return np.zeros(grid.shape)
    gx = _ramp(grid.x, grid.extent_x, plan.absorber_width)
    gy = _ramp(grid.y, grid.extent_y, plan.absorber_width)
    return plan.absorber_strength * (gy[:, None] + gx[None, :])


def spectral_power_beyond(values: np.ndarray, grid: Grid2D, kx_shift: float = 0.0,
                          fraction: float = NYQUIST_FRACTION,
                          transform: SpectralTransform = DEFAULT_TRANSFORM) -> float:
    """Share of spectral power at |k| beyond ``fraction`` of Nyquist on either axis (kx shifted by ``kx_shift``)."""
    power = np.abs(transform.forward(values)) ** 2
    total = power.sum()
    if total == 0.0:
        return 0.0
    kx = grid.kx + kx_shift
    outside = (np.abs(kx)[None, :] > fraction * grid.nyquist_x) | (np.abs(grid.ky)[:, None] > fraction * grid.nyquist_y)
    return float(power[outside].sum() / total)


def check_aliasing(field: ComplexField2D, A: float, delta_zeta: float,
                   transform: SpectralTransform = DEFAULT_TRANSFORM) -> None:
    """Reject runs whose spectrum reaches past 80% of Nyquist, now or after the potential's momentum drift."""
    for shift in (0.0, -2.0 * A * delta_zeta):
        beyond = spectral_power_beyond(field.values, field.grid, kx_shift=shift, transform=transform)
        if beyond > ALIASING_TOLERANCE:
            raise AliasingError(
                f"{beyond:.2e} of the spectral power lies beyond {NYQUIST_FRACTION:.0%} of Nyquist "
                f"(momentum drift {shift:+.3g}); refine the grid"
            )


def split_step_propagate(field: ComplexField2D, plan: SplitStepPlan, delta_zeta: float,
                         transform: SpectralTransform = DEFAULT_TRANSFORM) -> ComplexField2D:
    """
    Evolve ``field`` by ``delta_zeta`` with half-kinetic / potential / half-kinetic steps.
    The kinetic factor exp(-i k^2 h / 4) and the potential factor exp(-2i A x h) are exact.
    """
    if field.grid != plan.grid:
        raise ValueError("field and plan use different grids")
    if delta_zeta == 0.0 or not math.isfinite(delta_zeta):
        raise ValueError(f"delta_zeta must be finite and non-zero, got {delta_zeta}")
    check_aliasing(field, plan.A, delta_zeta, transform)

    grid = plan.grid
    steps = plan.step_count(delta_zeta)
    h = delta_zeta / steps
    log_debug(f"split-step: {steps} steps of {h:.3e} on {grid.nx}x{grid.ny}, A={plan.A:g}")

    k2 = grid.ky[:, None] ** 2 + grid.kx[None, :] ** 2
    half_kick = np.exp(-1j * k2 * h / 8.0)
    full_kick = half_kick * half_kick
    potential = np.exp(-2j * plan.A * grid.x * h)[None, :]
    damping = absorber_profile(plan)
    if plan.absorber_width > 0.0:
        potential = potential * np.exp(-damping * abs(h))

    spectrum = transform.forward(field.values) * half_kick
    for step in range(steps):
        psi = transform.inverse(spectrum) * potential
        spectrum = transform.forward(psi)
        spectrum *= full_kick if step < steps - 1 else half_kick
    values = transform.inverse(spectrum)
    return field.replace(values=values, zeta=field.zeta + delta_zeta, A=plan.A, normalized=field.normalized and plan.absorber_width == 0.0)


def split_step_trajectory(field: ComplexField2D, plan: SplitStepPlan, zetas,
                          transform: SpectralTransform = DEFAULT_TRANSFORM) -> list[ComplexField2D]:
    """Fields at each requested zeta (ascending or descending), propagating segment by segment."""
    out = []
    current = field
    for zeta in zetas:
        if zeta != current.zeta:
            current = split_step_propagate(current, plan, zeta - current.zeta, transform)
        out.append(current)
    return out


def kernel_propagate(field0: ComplexField2D, A: float, zeta: float) -> ComplexField2D:
    """
    Propagate by direct quadrature of the separable kernel: psi = K_y psi0 K_x^T dx dy.
    Cost is O(N^3), so grids are capped.
    """
    grid = field0.grid
    if abs(zeta) < KERNEL_ZETA_MIN:
        raise KernelSingularityError(f"kernel quadrature needs |zeta| >= {KERNEL_ZETA_MIN:g}, got {zeta:g}")
    if max(grid.nx, grid.ny) > KERNEL_GRID_CAP:
        raise GridSizeError(f"kernel quadrature is capped at {KERNEL_GRID_CAP} points per axis, got {grid.nx}x{grid.ny}")
    kx = kernel_x(grid.x[:, None], grid.x[None, :], A, zeta)
    ky = kernel_y(grid.y[:, None], grid.y[None, :], zeta)
    values = ky @ field0.values @ kx.T * grid.cell_area
    return field0.replace(values=values, zeta=field0.zeta + zeta, A=A, normalized=False)


__all__ = [
    "SpectralTransform",
    "NumpyFFT",
    "SplitStepPlan",
    "absorber_profile",
    "spectral_power_beyond",
    "check_aliasing",
    "split_step_propagate",
    "split_step_trajectory",
    "kernel_propagate",
]
