"""
Densities, probability current, current lines, centroids, orbital angular momentum and Gouy phase.

Currents are in reduced units with j = (1/2) Im(psi* grad psi), so that the local velocity
d(x~)/d(zeta) is j / |psi|^2 and d|psi|^2/d(zeta) + div j = 0.
"""
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from sqw.analytic import ModeSpec, mode_field, mode_values
from sqw.logger import log_debug, log_warning
from sqw.physics import ComplexField2D, Grid2D, ParticleBeam
from sqw.utils.configs.modes import OAMComponent
from sqw.utils.errors import NormalizationError, PureModeError

SPECTRAL_EDGE = 1e-10
SEED_NULL = 1e-12
POINT_STEP = 1e-5


@dataclass(frozen=True, eq=False)
class CurrentField:
    grid: Grid2D
    jx: np.ndarray
    jy: np.ndarray
    jz_proxy: np.ndarray


@dataclass(frozen=True, eq=False)
class Streamline:
    """A current line; ``points`` rows are (x~, y~, zeta) with zeta increasing."""
    seed: tuple[float, float, float]
    points: np.ndarray
    exited: bool = False


def density(field: ComplexField2D) -> np.ndarray:
    return np.abs(field.values) ** 2


def _fd4(values: np.ndarray, axis: int, h: float) -> np.ndarray:
    out = np.gradient(values, h, axis=axis, edge_order=2)
    if values.shape[axis] < 5:
        return out
    moved = np.moveaxis(values, axis, 0)
    interior = (-moved[4:] + 8.0 * moved[3:-1] - 8.0 * moved[1:-3] + moved[:-4]) / (12.0 * h)
    np.moveaxis(out, axis, 0)[2:-2] = interior
    return out


def _spectral_derivative(values: np.ndarray, k: np.ndarray, axis: int) -> np.ndarray:
    k = k.copy()
    k[k.size // 2] = 0.0  # Nyquist bin carries no odd derivative
    shape = [1, 1]
    shape[axis] = k.size
    spectrum = np.fft.fft(values, axis=axis)
    return np.fft.ifft(1j * k.reshape(shape) * spectrum, axis=axis)


def field_gradient(field: ComplexField2D) -> tuple[np.ndarray, np.ndarray]:
    """(d psi/dx, d psi/dy): spectral when the field vanishes at the edges, 4th-order differences otherwise."""
    values = field.values
    grid = field.grid
    peak = np.abs(values).max()
    edge = max(
        np.abs(values[0]).max(), np.abs(values[-1]).max(),
        np.abs(values[:, 0]).max(), np.abs(values[:, -1]).max(),
    )
    if peak == 0.0 or edge < SPECTRAL_EDGE * peak:
        return _spectral_derivative(values, grid.kx, 1), _spectral_derivative(values, grid.ky, 0)
    log_debug("field does not vanish at the grid edge; using 4th-order differences")
    return _fd4(values, 1, grid.dx), _fd4(values, 0, grid.dy)


def current_density(field: ComplexField2D) -> CurrentField:
    if min(field.grid.nx, field.grid.ny) < 3:
        raise ValueError("current density needs at least 3 nodes per axis")
    dpx, dpy = field_gradient(field)
    conj = np.conj(field.values)
    return CurrentField(
        grid=field.grid,
        jx=0.5 * np.imag(conj * dpx),
        jy=0.5 * np.imag(conj * dpy),
        jz_proxy=density(field),
    )


def current_divergence(current: CurrentField) -> np.ndarray:
    grid = current.grid
    djx = np.real(_spectral_derivative(current.jx, grid.kx, 1))
    djy = np.real(_spectral_derivative(current.jy, grid.ky, 0))
    return djx + djy


def center_of_mass(field: ComplexField2D) -> tuple[float, float]:
    rho = density(field)
    total = rho.sum()
    if total == 0.0:
        raise NormalizationError("centroid of an empty field")
    grid = field.grid
    x = float((rho.sum(axis=0) * grid.x).sum() / total)
    y = float((rho.sum(axis=1) * grid.y).sum() / total)
    return x, y


def momentum_expectation(field: ComplexField2D) -> tuple[float, float]:
    """<k_x>, <k_y> in inverse waists."""
    dpx, dpy = field_gradient(field)
    conj = np.conj(field.values)
    norm = np.sum(np.abs(field.values) ** 2)
    kx = float(np.real(np.sum(conj * -1j * dpx)) / norm)
    ky = float(np.real(np.sum(conj * -1j * dpy)) / norm)
    return kx, ky


def _velocity(mode: ModeSpec, A: float, points: np.ndarray, zeta: float) -> tuple[np.ndarray, np.ndarray]:
    """Velocity j / rho at ``points`` and the density there."""
    x, y = points[:, 0], points[:, 1]
    h = POINT_STEP
    psi = mode_field(mode, x, y, A, zeta)
    dpx = (mode_field(mode, x + h, y, A, zeta) - mode_field(mode, x - h, y, A, zeta)) / (2.0 * h)
    dpy = (mode_field(mode, x, y + h, A, zeta) - mode_field(mode, x, y - h, A, zeta)) / (2.0 * h)
    with np.errstate(divide="ignore", invalid="ignore"):
        velocity = 0.5 * np.stack([np.imag(dpx / psi), np.imag(dpy / psi)], axis=1)
    return velocity, np.abs(psi) ** 2


def _peak_density(mode: ModeSpec, A: float, zeta: float) -> float:
    width = math.sqrt(1.0 + zeta**2)
    extent = width * (4.0 + math.sqrt(mode.order + 1.0)) + abs(mode.offset_x) + abs(mode.offset_y) + 0.5 * abs(A) * zeta**2
    coarse = Grid2D(nx=128, ny=128, extent_x=extent, extent_y=extent)
    return float(np.max(np.abs(mode_values(mode, coarse, A, zeta)) ** 2))


def trace_current_lines(mode: ModeSpec, A: float, zeta_range: tuple[float, float],
                        seeds: Sequence[tuple[float, float]], grid: Grid2D | None = None,
                        step: float | None = None) -> list[Streamline]:
    """
    Integrate d(x~, y~)/d(zeta) = j / |psi|^2 with RK4, sampling the analytic field at every stage.
    Seeds sitting in a density null are dropped with a warning; lines leaving ``grid`` are truncated.
    """
    z0, z1 = float(zeta_range[0]), float(zeta_range[1])
    if not z1 > z0:
        raise ValueError(f"zeta range must be increasing, got {zeta_range}")
    span = z1 - z0
    dz = step if step is not None else min(0.01, span / 1000.0)
    n_steps = max(1, math.ceil(span / dz - 1e-9))
    dz = span / n_steps

    pts = np.atleast_2d(np.asarray(seeds, dtype=float))
    peak = _peak_density(mode, A, z0)
    rho0 = np.abs(mode_field(mode, pts[:, 0], pts[:, 1], A, z0)) ** 2
    keep = rho0 >= SEED_NULL * peak
    for rejected in pts[~keep]:
        log_warning(f"seed ({rejected[0]:g}, {rejected[1]:g}) sits in a density null; skipped")
    pts = pts[keep]
    if pts.size == 0:
        return []

    history = np.empty((n_steps + 1, pts.shape[0], 3))
    history[0, :, :2] = pts
    history[0, :, 2] = z0
    active = np.ones(pts.shape[0], dtype=bool)
    last = np.full(pts.shape[0], n_steps)
    blocked = np.zeros(pts.shape[0], dtype=bool)

    def stage(points: np.ndarray, z: float) -> np.ndarray:
        velocity, rho = _velocity(mode, A, points, z)
        # the peak density falls as 1 / (1 + zeta^2) while the mode spreads
        floor = SEED_NULL * peak * (1.0 + z0**2) / (1.0 + z**2)
        blocked[:] |= (rho < floor) | ~np.all(np.isfinite(velocity), axis=1)
        return velocity

    for i in range(n_steps):
        z = z0 + i * dz
        blocked[:] = False
        with np.errstate(invalid="ignore"):
            k1 = stage(pts, z)
            k2 = stage(pts + 0.5 * dz * k1, z + 0.5 * dz)
            k3 = stage(pts + 0.5 * dz * k2, z + 0.5 * dz)
            k4 = stage(pts + dz * k3, z + dz)
            stepped = pts + dz * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
        stalled = blocked & active
        for s in np.flatnonzero(stalled):
            log_warning(f"current line from ({history[0, s, 0]:g}, {history[0, s, 1]:g}) ran into a density null "
                        f"near zeta={z:g}; truncated")
        last[stalled] = i
        active &= ~blocked
        pts = np.where(active[:, None], stepped, pts)
        history[i + 1, :, :2] = pts
        history[i + 1, :, 2] = z0 + (i + 1) * dz
        if grid is not None:
            outside = (np.abs(pts[:, 0]) > grid.extent_x) | (np.abs(pts[:, 1]) > grid.extent_y)
            newly = outside & active
            last[newly] = i + 1
            active &= ~outside

    seeds_kept = np.atleast_2d(np.asarray(seeds, dtype=float))[keep]
    return [
        Streamline(
            seed=(float(seeds_kept[s, 0]), float(seeds_kept[s, 1]), z0),
            points=history[: last[s] + 1, s, :].copy(),
            exited=bool(last[s] < n_steps or not active[s]),
        )
        for s in range(seeds_kept.shape[0])
    ]


def _origin(field: ComplexField2D, origin) -> tuple[float, float]:
    if isinstance(origin, str):
        if origin == "center_of_mass":
            return center_of_mass(field)
        if origin == "lab":
            return 0.0, 0.0
        raise ValueError(f"unknown origin {origin!r}")
    return float(origin[0]), float(origin[1])


def oam_expectation(field: ComplexField2D, component: OAMComponent | str = OAMComponent.z,
                    beam: ParticleBeam | None = None, origin="center_of_mass") -> float:
    """
    Orbital angular momentum expectation in units of hbar.

    L_z = <-i((x - x0) d/dy - (y - y0) d/dx)>. L_x and L_y use the paraxial momentum
    (p_x, p_y, p0) at position (x, y, z); they need ``beam`` for the longitudinal wavenumber.
    """
    component = OAMComponent(component)
    norm2 = field.norm_squared()
    if abs(norm2 - 1.0) > 1e-6:
        raise NormalizationError(f"OAM needs a normalized field, norm^2 = {norm2:.9f}")
    x0, y0 = _origin(field, origin)
    grid = field.grid
    psi = field.values
    if component == OAMComponent.z:
        dpx, dpy = field_gradient(field)
        X, Y = grid.mesh
        lz = np.sum(np.conj(psi) * -1j * ((X - x0) * dpy - (Y - y0) * dpx)) * grid.cell_area
        return float(np.real(lz))
    if beam is None:
        raise ValueError("L_x and L_y need the beam's longitudinal momentum")
    k0 = beam.k0
    cx, cy = center_of_mass(field)
    kx, ky = momentum_expectation(field)
    half_z = 0.5 * k0 * field.zeta  # z / w0 in units where p_x = hbar k_x / w0
    if component == OAMComponent.x:
        return float(k0 * (cy - y0) - half_z * ky)
    return float(half_z * kx - k0 * (cx - x0))


def _wrap(angle: float) -> float:
    return (angle + math.pi) % (2.0 * math.pi) - math.pi


def gouy_phase(field: ComplexField2D, reference_mode: ModeSpec) -> float:
    """
    Gouy phase of a pure mode: minus the argument of the overlap with the same mode built
    without its Gouy factor (centroid shift, tilt and cubic phase included). The branch
    continuous from 0 at zeta = 0 is returned.
    """
    zeta = field.zeta
    branch = (reference_mode.order + 1) * math.atan(zeta)
    reference = mode_values(reference_mode, field.grid, field.A, zeta) * np.exp(1j * branch)
    ref_norm = np.sqrt(np.sum(np.abs(reference) ** 2))
    psi_norm = np.sqrt(np.sum(np.abs(field.values) ** 2))
    overlap = np.vdot(reference, field.values) / (ref_norm * psi_norm)
    if abs(overlap) < 0.99:
        raise PureModeError(f"overlap with {reference_mode.label} is {abs(overlap):.4f}; not a pure mode")
    return branch + _wrap(-float(np.angle(overlap)) - branch)


__all__ = [
    "CurrentField",
    "Streamline",
    "density",
    "field_gradient",
    "current_density",
    "current_divergence",
    "center_of_mass",
    "momentum_expectation",
    "trace_current_lines",
    "oam_expectation",
    "gouy_phase",
]
