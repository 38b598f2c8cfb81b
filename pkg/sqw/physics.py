"""
Physical parameter records, the reduction to dimensionless units and the transverse grid.

Lengths across the beam are measured in waists (x~ = x / w0), distance along the beam in
Rayleigh ranges (zeta = z / z_R) and the linear potential alpha*x by the single number
A = alpha m z_R^2 / (p0^2 w0). In these units the paraxial equation reads

    i d(psi)/d(zeta) = -(1/4) lap(psi) + 2 A x~ psi

so the packet centroid follows x~0 - A zeta^2 / 2.
"""
from dataclasses import dataclass
from typing import Annotated

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from sqw.consts import HBAR, PLANCK_H
from sqw.utils.errors import NormalizationError

PositiveFinite = Annotated[float, Field(gt=0, allow_inf_nan=False)]
Finite = Annotated[float, Field(allow_inf_nan=False)]


class ParticleBeam(BaseModel):
    """
    Mass, central longitudinal momentum and waist of a paraxial matter-wave beam (SI).
    """
    model_config = ConfigDict(frozen=True)

    mass: PositiveFinite
    p0: PositiveFinite
    w0: PositiveFinite

    @classmethod
    def from_wavelength(cls, mass: float, wavelength: float, w0: float) -> "ParticleBeam":
        if wavelength <= 0:
            raise ValueError("de Broglie wavelength must be positive")
        return cls(mass=mass, p0=PLANCK_H / wavelength, w0=w0)

    @property
    def hbar(self) -> float:
        return HBAR

    @property
    def rayleigh_range(self) -> float:
        return self.p0 * self.w0**2 / (2.0 * HBAR)

    @property
    def de_broglie_wavelength(self) -> float:
        return PLANCK_H / self.p0

    @property
    def k0(self) -> float:
        """Longitudinal wavenumber in inverse waists, p0 w0 / hbar (= 2 z_R / w0)."""
        return self.p0 * self.w0 / HBAR

    def zeta_from_z(self, z):
        return z / self.rayleigh_range

    def z_from_zeta(self, zeta):
        return zeta * self.rayleigh_range

    def x_from_reduced(self, x_reduced):
        return x_reduced * self.w0

    def reduced_from_x(self, x):
        return x / self.w0


class PotentialSpec(BaseModel):
    """
    Linear potential V = alpha x. ``alpha`` is None when the potential was given in reduced form only.
    """
    model_config = ConfigDict(frozen=True)

    A: Finite
    alpha: Finite | None = None

    @model_validator(mode="after")
    def _zero_together(self) -> "PotentialSpec":
        if self.alpha is not None and (self.alpha == 0) != (self.A == 0):
            raise ValueError("alpha and A must vanish together")
        return self

    @classmethod
    def from_reduced(cls, A: float, beam: ParticleBeam | None = None) -> "PotentialSpec":
        if beam is None:
            return cls(A=A)
        z_r = beam.rayleigh_range
        return cls(A=A, alpha=A * beam.p0**2 * beam.w0 / (beam.mass * z_r**2))


def rayleigh_range(beam: ParticleBeam) -> float:
    return beam.rayleigh_range


def nondimensionalize(beam: ParticleBeam, alpha: float) -> PotentialSpec:
    if not np.isfinite(alpha):
        raise ValueError("alpha must be finite")
    z_r = beam.rayleigh_range
    A = alpha * beam.mass * z_r**2 / (beam.p0**2 * beam.w0)
    return PotentialSpec(A=A, alpha=alpha)


def tau_si(beam: ParticleBeam, alpha: float) -> float:
    return 2.0 * beam.mass * alpha / HBAR**2


def classical_trajectory_si(beam: ParticleBeam, alpha: float, z):
    """Transverse position (m) of a classical particle launched on axis, after distance z."""
    return -beam.mass * alpha * np.asarray(z) ** 2 / (2.0 * beam.p0**2)


class Grid2D(BaseModel):
    """
    Uniform cell-centred transverse grid, symmetric about the origin, in waist units.
    """
    model_config = ConfigDict(frozen=True)

    nx: int = Field(ge=8)
    ny: int = Field(ge=8)
    extent_x: PositiveFinite
    extent_y: PositiveFinite

    @model_validator(mode="after")
    def _even_counts(self) -> "Grid2D":
        if self.nx % 2 or self.ny % 2:
            raise ValueError(f"grid counts must be even for the spectral method, got {self.nx}x{self.ny}")
        return self

    @property
    def dx(self) -> float:
        return 2.0 * self.extent_x / self.nx

    @property
    def dy(self) -> float:
        return 2.0 * self.extent_y / self.ny

    @property
    def cell_area(self) -> float:
        return self.dx * self.dy

    @property
    def shape(self) -> tuple[int, int]:
        return (self.ny, self.nx)

    @property
    def x(self) -> np.ndarray:
        return (np.arange(self.nx) - (self.nx - 1) / 2.0) * self.dx

    @property
    def y(self) -> np.ndarray:
        return (np.arange(self.ny) - (self.ny - 1) / 2.0) * self.dy

    @property
    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.x, self.y)

    @property
    def kx(self) -> np.ndarray:
        return 2.0 * np.pi * np.fft.fftfreq(self.nx, d=self.dx)

    @property
    def ky(self) -> np.ndarray:
        return 2.0 * np.pi * np.fft.fftfreq(self.ny, d=self.dy)

    @property
    def nyquist_x(self) -> float:
        return np.pi / self.dx

    @property
    def nyquist_y(self) -> float:
        return np.pi / self.dy


def make_grid(nx: int, ny: int, extent_x: float, extent_y: float) -> Grid2D:
    return Grid2D(nx=nx, ny=ny, extent_x=extent_x, extent_y=extent_y)


@dataclass(frozen=True, eq=False)
class ComplexField2D:
    """
    Wavefunction sampled on ``grid``. ``values`` has shape (ny, nx); rows run along y.
    ``A`` records the reduced potential the field lives in.
    """
    grid: Grid2D
    values: np.ndarray
    zeta: float = 0.0
    A: float = 0.0
    normalized: bool = False
    mode: str | None = None

    def __post_init__(self):
        values = np.ascontiguousarray(self.values, dtype=np.complex128)
        if values.shape != self.grid.shape:
            raise ValueError(f"values shape {values.shape} does not match grid {self.grid.shape}")
        object.__setattr__(self, "values", values)

    def norm_squared(self) -> float:
        return float(np.sum(np.abs(self.values) ** 2) * self.grid.cell_area)

    def normalize(self) -> "ComplexField2D":
        norm2 = self.norm_squared()
        if not np.isfinite(norm2) or norm2 <= 0.0:
            raise NormalizationError(f"cannot normalize a field with norm^2 = {norm2}")
        return self.replace(values=self.values / np.sqrt(norm2), normalized=True)

    def replace(self, **changes) -> "ComplexField2D":
        params = dict(grid=self.grid, values=self.values, zeta=self.zeta, A=self.A,
                      normalized=self.normalized, mode=self.mode)
        params.update(changes)
        return ComplexField2D(**params)


def inner_product(a: ComplexField2D, b: ComplexField2D) -> complex:
    """<a|b> on the shared grid."""
    if a.grid != b.grid:
        raise ValueError("fields live on different grids")
    return complex(np.vdot(a.values, b.values) * a.grid.cell_area)


def l2_distance(a: ComplexField2D, b: ComplexField2D, align_phase: bool = False) -> float:
    """
    L2 distance between two fields; with ``align_phase`` the global phase of ``b`` is first
    rotated onto ``a``.
    """
    other = b.values
    if align_phase:
        overlap = inner_product(b, a)
        if abs(overlap) > 0:
            other = other * (overlap / abs(overlap))
    diff = a.values - other
    return float(np.sqrt(np.sum(np.abs(diff) ** 2) * a.grid.cell_area))


__all__ = [
    "ParticleBeam",
    "PotentialSpec",
    "Grid2D",
    "ComplexField2D",
    "rayleigh_range",
    "nondimensionalize",
    "tau_si",
    "classical_trajectory_si",
    "make_grid",
    "inner_product",
    "l2_distance",
]
