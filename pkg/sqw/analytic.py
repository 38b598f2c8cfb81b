"""
Closed-form Hermite-Gauss and Laguerre-Gauss fields in a linear potential, and the propagation kernels.

A free solution phi(x~, zeta) becomes, in the potential,

    psi(x~, zeta) = phi(x~ + A zeta^2/2, zeta) exp(-2i A zeta x~) exp(-i A^2 zeta^3 / 3)

so every mode keeps its shape, rides the classical parabola and picks up a tilt and a
cubic phase that do not depend on the mode indices.
"""
import math
from dataclasses import dataclass

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from sqw.consts import CAPTURE_THRESHOLD, ZETA_MIN
from sqw.logger import log_debug, log_warning
from sqw.physics import ComplexField2D, Grid2D, ParticleBeam
from sqw.specfun import hermite, laguerre
from sqw.utils.configs.modes import ModeFamily
from sqw.utils.errors import GridCaptureError, KernelSingularityError


class ModeSpec(BaseModel):
    """
    HG(m, n) or LG(ell, p) with a transverse offset in waist units.
    """
    model_config = ConfigDict(frozen=True)

    family: ModeFamily = ModeFamily.HG
    first: int = 0
    second: int = Field(default=0, ge=0)
    offset_x: float = Field(default=0.0, allow_inf_nan=False)
    offset_y: float = Field(default=0.0, allow_inf_nan=False)

    @model_validator(mode="after")
    def _indices(self) -> "ModeSpec":
        if self.family == ModeFamily.HG and self.first < 0:
            raise ValueError(f"HG index m must be non-negative, got {self.first}")
        return self

    @classmethod
    def hg(cls, m: int, n: int, offset_x: float = 0.0, offset_y: float = 0.0) -> "ModeSpec":
        return cls(family=ModeFamily.HG, first=m, second=n, offset_x=offset_x, offset_y=offset_y)

    @classmethod
    def lg(cls, ell: int, p: int, offset_x: float = 0.0, offset_y: float = 0.0) -> "ModeSpec":
        return cls(family=ModeFamily.LG, first=ell, second=p, offset_x=offset_x, offset_y=offset_y)

    @property
    def order(self) -> int:
        """Total order N; the Gouy phase is (N + 1) arctan(zeta)."""
        if self.family == ModeFamily.HG:
            return self.first + self.second
        return 2 * self.second + abs(self.first)

    @property
    def label(self) -> str:
        return f"{self.family.value}({self.first},{self.second})"

    def shifted(self, dx: float = 0.0, dy: float = 0.0) -> "ModeSpec":
        return self.model_copy(update={"offset_x": self.offset_x + dx, "offset_y": self.offset_y + dy})


@dataclass(frozen=True)
class PropagatedTerms:
    """Potential-induced terms and the Gouy factor of one mode at one zeta."""
    centroid_shift: float
    tilt_phase_coeff: float
    t3_phase: float
    gouy_factor: complex


def hermite_gauss_1d(m: int, x, zeta: float = 0.0, A: float = 0.0, offset: float = 0.0):
    """
    Unit-norm 1D Hermite-Gauss factor exp(-u^2) H_m(sqrt(2) u) propagated to ``zeta`` in the
    reduced potential ``A``; evaluable at arbitrary points.
    """
    x = np.asarray(x, dtype=float)
    u = x + 0.5 * A * zeta**2 - offset
    q = 1.0 + 1j * zeta
    norm = (2.0 / math.pi) ** 0.25 / math.sqrt(2.0**m * math.factorial(m))
    envelope = np.exp(-(u**2) / q) / np.sqrt(q)
    poly = hermite(m, math.sqrt(2.0) * u / math.sqrt(1.0 + zeta**2))
    gouy = np.exp(-1j * m * math.atan(zeta))
    potential = np.exp(-1j * (2.0 * A * zeta * x + A**2 * zeta**3 / 3.0))
    return norm * envelope * poly * gouy * potential


def lg_from_hg_coeffs(ell: int, p: int) -> list[tuple[int, int, complex]]:
    """
    Unitary expansion of LG(ell, p) over HG(m, n) with m + n = 2p + |ell|.
    """
    if p < 0:
        raise ValueError(f"radial index p must be non-negative, got {p}")
    a = p + max(-ell, 0)
    b = p + max(ell, 0)
    order = a + b
    coeffs = []
    for k in range(order + 1):
        # coefficient of t^k in (1 - t)^a (1 + t)^b
        poly = sum(
            math.comb(a, j) * (-1) ** j * math.comb(b, k - j)
            for j in range(max(0, k - b), min(k, a) + 1)
        )
        if poly == 0:
            continue
        weight = math.sqrt(
            math.factorial(order - k) * math.factorial(k) / (2.0**order * math.factorial(a) * math.factorial(b))
        )
        coeffs.append((order - k, k, complex((1j**k) * weight * poly)))
    return coeffs


def mode_terms(mode: ModeSpec) -> list[tuple[int, int, complex]]:
    if mode.family == ModeFamily.HG:
        return [(mode.first, mode.second, 1.0 + 0j)]
    return lg_from_hg_coeffs(mode.first, mode.second)


def mode_field(mode: ModeSpec, x, y, A: float = 0.0, zeta: float = 0.0):
    """Analytic field of ``mode`` at arbitrary (broadcastable) points."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    total = np.zeros(np.broadcast_shapes(x.shape, y.shape), dtype=complex)
    for m, n, c in mode_terms(mode):
        total = total + c * hermite_gauss_1d(m, x, zeta, A, mode.offset_x) * hermite_gauss_1d(
            n, y, zeta, 0.0, mode.offset_y
        )
    return total


def mode_values(mode: ModeSpec, grid: Grid2D, A: float = 0.0, zeta: float = 0.0) -> np.ndarray:
    """Analytic field of ``mode`` on ``grid`` (shape (ny, nx)), built from separable factors."""
    values = np.zeros(grid.shape, dtype=complex)
    cache_x: dict[int, np.ndarray] = {}
    cache_y: dict[int, np.ndarray] = {}
    for m, n, c in mode_terms(mode):
        if m not in cache_x:
            cache_x[m] = hermite_gauss_1d(m, grid.x, zeta, A, mode.offset_x)
        if n not in cache_y:
            cache_y[n] = hermite_gauss_1d(n, grid.y, zeta, 0.0, mode.offset_y)
        values += c * np.outer(cache_y[n], cache_x[m])
    return values


def _sampled(mode: ModeSpec, grid: Grid2D, A: float, zeta: float, strict: bool) -> ComplexField2D:
    raw = ComplexField2D(grid=grid, values=mode_values(mode, grid, A, zeta), zeta=zeta, A=A, mode=mode.label)
    captured = raw.norm_squared()
    log_debug(f"{mode.label} at zeta={zeta:g}: grid captures {captured:.12f} of the norm")
    if captured < CAPTURE_THRESHOLD:
        message = (
            f"grid {grid.nx}x{grid.ny} (extent {grid.extent_x:g} x {grid.extent_y:g}) holds only "
            f"{captured:.6f} of {mode.label}; enlarge the extents"
        )
        if strict:
            raise GridCaptureError(message)
        log_warning(message)
    return raw.normalize()


def _require(mode: ModeSpec, family: ModeFamily) -> None:
    if mode.family != family:
        raise ValueError(f"expected a {family.value} mode, got {mode.label}")


def hg_initial(mode: ModeSpec, grid: Grid2D) -> ComplexField2D:
    _require(mode, ModeFamily.HG)
    return _sampled(mode, grid, 0.0, 0.0, strict=True)


def hg_propagated(mode: ModeSpec, A: float, zeta: float, grid: Grid2D) -> ComplexField2D:
    _require(mode, ModeFamily.HG)
    return _sampled(mode, grid, A, zeta, strict=False)


def lg_initial(mode: ModeSpec, grid: Grid2D) -> ComplexField2D:
    """
    LG field at zeta = 0 from the polar closed form (-1)^p C (sqrt2 r)^|l| L_p^|l|(2r^2) exp(-r^2 + i l phi),
    with the (-1)^p sign matching the HG superposition.
    """
    _require(mode, ModeFamily.LG)
    ell, p = mode.first, mode.second
    X, Y = grid.mesh
    dx = X - mode.offset_x
    dy = Y - mode.offset_y
    r2 = dx**2 + dy**2
    phi = np.arctan2(dy, dx)
    const = math.sqrt(2.0 * math.factorial(p) / (math.pi * math.factorial(p + abs(ell))))
    values = (
        (-1) ** p * const * (2.0 * r2) ** (abs(ell) / 2.0) * laguerre(p, abs(ell), 2.0 * r2)
        * np.exp(-r2) * np.exp(1j * ell * phi)
    )
    raw = ComplexField2D(grid=grid, values=values, zeta=0.0, A=0.0, mode=mode.label)
    if raw.norm_squared() < CAPTURE_THRESHOLD:
        raise GridCaptureError(f"grid too small to hold {mode.label}; enlarge the extents")
    return raw.normalize()


def lg_propagated(mode: ModeSpec, A: float, zeta: float, grid: Grid2D) -> ComplexField2D:
    _require(mode, ModeFamily.LG)
    return _sampled(mode, grid, A, zeta, strict=False)


def propagate_mode(mode: ModeSpec, A: float, zeta: float, grid: Grid2D) -> ComplexField2D:
    """Dispatch to the HG or LG propagated field."""
    if mode.family == ModeFamily.HG:
        return hg_propagated(mode, A, zeta, grid)
    return lg_propagated(mode, A, zeta, grid)


def initial_mode(mode: ModeSpec, grid: Grid2D) -> ComplexField2D:
    if mode.family == ModeFamily.HG:
        return hg_initial(mode, grid)
    return lg_initial(mode, grid)


def kernel_x(x, x_prime, A: float, zeta: float):
    """
    Reduced propagation kernel along the potential axis,
    (i pi zeta)^(-1/2) exp(-i [A^2 zeta^3/12 - (x - x')^2/zeta + A zeta (x + x')]).
    """
    if abs(zeta) < ZETA_MIN:
        raise KernelSingularityError(f"kernel is distributional at |zeta| < {ZETA_MIN:g} (got {zeta:g})")
    x = np.asarray(x, dtype=float)
    x_prime = np.asarray(x_prime, dtype=float)
    prefactor = np.sqrt(1.0 / (1j * math.pi * zeta))
    phase = A**2 * zeta**3 / 12.0 - (x - x_prime) ** 2 / zeta + A * zeta * (x + x_prime)
    return (prefactor * np.exp(-1j * phase))[()]


def kernel_y(y, y_prime, zeta: float):
    return kernel_x(y, y_prime, 0.0, zeta)


def kernel_x_si(x, x_prime, alpha: float, z: float, beam: ParticleBeam):
    """The x kernel in SI units (per metre of x')."""
    hbar, m, p0 = beam.hbar, beam.mass, beam.p0
    if abs(z) < ZETA_MIN * beam.rayleigh_range:
        raise KernelSingularityError("kernel is distributional at z = 0")
    x = np.asarray(x, dtype=float)
    x_prime = np.asarray(x_prime, dtype=float)
    f = (
        alpha**2 * m**2 * z**3 / (24.0 * hbar * p0**3)
        - p0 / (2.0 * hbar * z) * (x - x_prime) ** 2
        + alpha * m * z / (2.0 * hbar * p0) * (x + x_prime)
    )
    return (np.sqrt(p0 / (2j * math.pi * hbar * z)) * np.exp(-1j * f))[()]


def classical_centroid(A: float, zeta, x0: float = 0.0):
    return x0 - 0.5 * A * np.square(zeta)


def t3_phase(A: float, zeta):
    return A**2 * np.power(zeta, 3) / 3.0


def propagated_terms(A: float, zeta: float, m: int = 0, n: int = 0) -> PropagatedTerms:
    return PropagatedTerms(
        centroid_shift=-0.5 * A * zeta**2,
        tilt_phase_coeff=-2.0 * A * zeta,
        t3_phase=t3_phase(A, zeta),
        gouy_factor=complex(np.exp(-1j * (m + n + 1) * math.atan(zeta))),
    )


__all__ = [
    "ModeSpec",
    "PropagatedTerms",
    "hermite_gauss_1d",
    "lg_from_hg_coeffs",
    "mode_terms",
    "mode_field",
    "mode_values",
    "hg_initial",
    "hg_propagated",
    "lg_initial",
    "lg_propagated",
    "propagate_mode",
    "initial_mode",
    "kernel_x",
    "kernel_y",
    "kernel_x_si",
    "classical_centroid",
    "t3_phase",
    "propagated_terms",
]
