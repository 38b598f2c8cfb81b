"""
Eigenbasis route: Airy eigenstates of the x Hamiltonian, plane waves along y, expansion
coefficients of Hermite-Gauss modes, evolution by phases and reconstruction on a grid.

Reduced Hamiltonian along x: -(1/4) d^2/dx~^2 + 2 A x~. Its eigenstates, delta-normalised in
the reduced energy eps, are

    chi_eps(x~) = |a| / sqrt(|2A|) Ai(a (x~ - eps / (2A))),   a = (8A)^(1/3)

and each carries the phase exp(-i eps zeta); plane waves exp(i k y~) / sqrt(2 pi) carry
exp(-i k^2 zeta / 4). Continuum integrals become uniform Riemann sums, so every stored
coefficient stands for c(eps) with weight d_eps.
"""
import math
from dataclasses import dataclass, replace
from typing import Literal

import numpy as np

from sqw.analytic import ModeSpec, mode_terms
from sqw.consts import SPECTRAL_TAIL
from sqw.logger import log_debug
from sqw.physics import ComplexField2D, Grid2D
from sqw.quadrature import gaussian_half_width, integrate_panels
from sqw.specfun import airy_ai, airy_transform_hg, hermite
from sqw.utils.errors import QuadratureError, SpectralTailError

GHOST_MARGIN = 6.0
DEFAULT_ZETA_MAX = 2.0
DEFAULT_EXTENT = 8.0
MAX_WIDENINGS = 40
TAIL_SAMPLES = 3


def _hg_norm(m: int) -> float:
    return (2.0 / math.pi) ** 0.25 / math.sqrt(2.0**m * math.factorial(m))


def _airy_scale(A: float) -> float:
    return float(np.cbrt(8.0 * A))


def eigenstate_x(epsilon, A: float, x):
    """Delta-normalised Airy eigenstate of the reduced x Hamiltonian; broadcasts eps against x~."""
    if A == 0:
        raise ValueError("the Airy eigenbasis needs A != 0; use plane waves for a free axis")
    a = _airy_scale(A)
    epsilon = np.asarray(epsilon, dtype=float)
    x = np.asarray(x, dtype=float)
    return (abs(a) / math.sqrt(abs(2.0 * A)) * airy_ai(a * (x - epsilon / (2.0 * A))))[()]


def plane_wave_coeff(n: int, k, offset: float = 0.0):
    """<k|n> for the unit-norm 1D Hermite-Gauss factor centred at ``offset``."""
    if n < 0:
        raise ValueError(f"mode index must be non-negative, got {n}")
    k = np.asarray(k, dtype=float)
    value = _hg_norm(n) * (-1j) ** n * hermite(n, k / math.sqrt(2.0)) * np.exp(-0.25 * k**2) / math.sqrt(2.0)
    if offset:
        value = value * np.exp(-1j * k * offset)
    return value[()]


def expansion_coeff_y(n: int, k, offset: float = 0.0):
    return plane_wave_coeff(n, k, offset)


def _quadrature_coeff_x(m: int, epsilon: np.ndarray, A: float, offset: float, panels: int) -> np.ndarray:
    half_width = gaussian_half_width(m)
    norm = _hg_norm(m)

    def integrand(u):
        profile = norm * np.exp(-(u**2)) * hermite(m, math.sqrt(2.0) * u)
        return eigenstate_x(epsilon[:, None], A, (u + offset)[None, :]) * profile[None, :]

    return integrate_panels(integrand, -half_width, half_width, panels=panels)


def expansion_coeff_x(m: int, epsilon, A: float, offset: float = 0.0,
                      method: Literal["quadrature", "closed_form"] = "quadrature", panels: int = 96):
    """
    <eps|m>: overlap of the Airy eigenstate with the unit-norm HG factor of order ``m``
    centred at ``offset``. ``closed_form`` evaluates the Hermite-Gauss Airy transform;
    ``quadrature`` integrates the overlap directly and checks convergence by panel doubling.
    """
    if A == 0:
        raise ValueError("the Airy eigenbasis needs A != 0; use plane waves for a free axis")
    if m < 0:
        raise ValueError(f"mode index must be non-negative, got {m}")
    eps = np.atleast_1d(np.asarray(epsilon, dtype=float))
    if method == "closed_form":
        a = _airy_scale(A)
        y = eps / (2.0 * A) - offset
        transform = airy_transform_hg(m, -1.0 / a, y)
        values = abs(a) / math.sqrt(abs(2.0 * A)) * _hg_norm(m) * np.asarray(transform) / abs(a)
    elif method == "quadrature":
        coarse = _quadrature_coeff_x(m, eps, A, offset, panels)
        values = _quadrature_coeff_x(m, eps, A, offset, 2 * panels)
        scale = max(float(np.abs(values).max()), 1e-300)
        drift = float(np.abs(values - coarse).max())
        if drift > 1e-10 * scale:
            raise QuadratureError(
                f"Airy overlap for m={m}, A={A:g} changed by {drift:.2e} under panel doubling "
                f"(eps in [{eps.min():.4g}, {eps.max():.4g}]); raise the panel count"
            )
    else:
        raise ValueError(f"unknown method {method!r}")
    return values if np.ndim(epsilon) else float(values[0])


def energy_centroid(m: int, A: float, offset: float = 0.0) -> float:
    """<H_x> of the HG factor of order m centred at ``offset``."""
    return (2 * m + 1) / 4.0 + 2.0 * A * offset


@dataclass(frozen=True, eq=False)
class SpectralGrid:
    """
    Uniform samples of the x spectrum (Airy energies, or k_x when A = 0) and of k_y, plus the
    window (|x~| <= extent_x, |y~| <= extent_y, |zeta| <= zeta_max) inside which the Riemann
    sums are free of periodic ghosts.
    """
    A: float
    epsilon: np.ndarray
    k: np.ndarray
    extent_x: float
    extent_y: float
    zeta_max: float

    @property
    def airy(self) -> bool:
        return self.A != 0

    @property
    def d_epsilon(self) -> float:
        return float(self.epsilon[1] - self.epsilon[0])

    @property
    def d_k(self) -> float:
        return float(self.k[1] - self.k[0])


@dataclass(frozen=True, eq=False)
class SpectralCoefficients:
    """
    Expansion of a mode over the spectral grid. Each term (m, n, weight) contributes
    weight * c[t](eps) d[t](k); HG modes have one term, LG modes several.
    """
    grid: SpectralGrid
    terms: tuple[tuple[int, int, complex], ...]
    c: np.ndarray
    d: np.ndarray
    zeta: float = 0.0
    mode: ModeSpec | None = None

    def parseval_x(self) -> np.ndarray:
        return np.sum(np.abs(self.c) ** 2, axis=1) * self.grid.d_epsilon

    def parseval_y(self) -> np.ndarray:
        return np.sum(np.abs(self.d) ** 2, axis=1) * self.grid.d_k


def _ghost_period(A: float, order: int, extent: float, zeta_max: float) -> float:
    """
    Smallest T for which the copy of the packet delayed by T, falling along -A zeta^2 / 2,
    stays clear of |x~| <= extent for every |zeta| <= zeta_max.
    """
    reach = GHOST_MARGIN + math.sqrt(2 * order + 1.0)
    T = abs(zeta_max) + 1.0
    for _ in range(200):
        gap = 0.5 * abs(A) * (T - abs(zeta_max)) ** 2 - extent
        if gap >= reach * math.sqrt(1.0 + (T + abs(zeta_max)) ** 2):
            return T
        T *= 1.1
    raise SpectralTailError(f"no ghost-free period found for A={A:g}; the potential is too weak for the Airy route")


def _tails_ok(values: np.ndarray) -> bool:
    mags = np.abs(values)
    peak = mags.max()
    if peak == 0.0:
        return True
    edge = max(mags[..., :TAIL_SAMPLES].max(), mags[..., -TAIL_SAMPLES:].max())
    return edge < SPECTRAL_TAIL * peak


def _k_axis(order: int, extent: float, zeta_max: float, offset: float) -> np.ndarray:
    reach = GHOST_MARGIN + math.sqrt(2 * order + 1.0)
    period = 2.0 * extent + 2.0 * reach * math.sqrt(1.0 + zeta_max**2) + 2.0 * abs(offset)
    dk = 2.0 * math.pi / period
    k_max = gaussian_half_width(order, scale=2.0, tail=1e-10)
    count = int(math.ceil(k_max / dk))
    return dk * np.arange(-count, count + 1)


def build_spectral_grid(mode: ModeSpec, A: float, extent_x: float = DEFAULT_EXTENT, extent_y: float = DEFAULT_EXTENT,
                        zeta_max: float = DEFAULT_ZETA_MAX, method: Literal["quadrature", "closed_form"] = "closed_form") -> SpectralGrid:
    """
    Sample spacing from the ghost-free condition, ranges widened around the energy centroid
    until the coefficients fall below the tail threshold at both ends.
    """
    terms = mode_terms(mode)
    max_m = max(m for m, _, _ in terms)
    max_n = max(n for _, n, _ in terms)
    k = _k_axis(max_n, extent_y, zeta_max, mode.offset_y)

    if A == 0:
        epsilon = _k_axis(max_m, extent_x, zeta_max, mode.offset_x)
        return SpectralGrid(A=0.0, epsilon=epsilon, k=k, extent_x=extent_x, extent_y=extent_y, zeta_max=zeta_max)

    d_eps = 2.0 * math.pi / _ghost_period(A, max_m, extent_x, zeta_max)
    centre = energy_centroid(max_m, A, mode.offset_x)
    half = 2.0 * abs(A) * gaussian_half_width(max_m, scale=1.0, tail=1e-8) + 2.0
    for _ in range(MAX_WIDENINGS):
        count = int(math.ceil(half / d_eps))
        epsilon = centre + d_eps * np.arange(-count, count + 1)
        trial = [expansion_coeff_x(m, epsilon, A, mode.offset_x, method=method) for m in sorted({t[0] for t in terms})]
        if all(_tails_ok(p) for p in trial):
            log_debug(f"spectral grid: {epsilon.size} energies (d_eps={d_eps:.4g}), {k.size} wavenumbers")
            return SpectralGrid(A=A, epsilon=epsilon, k=k, extent_x=extent_x, extent_y=extent_y, zeta_max=zeta_max)
        half *= 1.5
        log_debug(f"widening energy window to +/-{half:.3g} around {centre:.4g}")
    raise SpectralTailError(f"energy window for {mode.label} at A={A:g} never met the {SPECTRAL_TAIL:g} tail criterion")


def analyze(mode: ModeSpec, A: float, grid: Grid2D | None = None, zeta_max: float = DEFAULT_ZETA_MAX,
            method: Literal["quadrature", "closed_form"] = "closed_form",
            spectral_grid: SpectralGrid | None = None) -> SpectralCoefficients:
    """Expansion coefficients of ``mode`` at zeta = 0 in the eigenbasis of the potential ``A``."""
    if spectral_grid is None:
        extent_x = grid.extent_x if grid is not None else DEFAULT_EXTENT
        extent_y = grid.extent_y if grid is not None else DEFAULT_EXTENT
        spectral_grid = build_spectral_grid(mode, A, extent_x, extent_y, zeta_max, method=method)
    elif spectral_grid.A != A:
        raise ValueError(f"spectral grid was built for A={spectral_grid.A:g}, not {A:g}")
    terms = tuple(mode_terms(mode))
    if spectral_grid.airy:
        c = np.stack([
            np.asarray(expansion_coeff_x(m, spectral_grid.epsilon, A, mode.offset_x, method=method), dtype=complex)
            for m, _, _ in terms
        ])
    else:
        c = np.stack([plane_wave_coeff(m, spectral_grid.epsilon, mode.offset_x) for m, _, _ in terms])
    d = np.stack([plane_wave_coeff(n, spectral_grid.k, mode.offset_y) for _, n, _ in terms])
    if not (_tails_ok(c) and _tails_ok(d)):
        raise SpectralTailError(f"coefficients of {mode.label} are not captured by the spectral grid; widen its ranges")
    return SpectralCoefficients(grid=spectral_grid, terms=terms, c=c, d=d, zeta=0.0, mode=mode)


def evolve_in_eigenbasis(coeffs: SpectralCoefficients, zeta: float) -> SpectralCoefficients:
    """Advance by ``zeta``: c *= exp(-i eps zeta) (or exp(-i k_x^2 zeta / 4) on a free axis), d *= exp(-i k^2 zeta / 4)."""
    if zeta == 0:
        return coeffs
    grid = coeffs.grid
    energies = grid.epsilon if grid.airy else 0.25 * grid.epsilon**2
    c = coeffs.c * np.exp(-1j * energies * zeta)[None, :]
    d = coeffs.d * np.exp(-0.25j * grid.k**2 * zeta)[None, :]
    return replace(coeffs, c=c, d=d, zeta=coeffs.zeta + zeta)


def _x_basis(grid: SpectralGrid, x: np.ndarray) -> np.ndarray:
    if grid.airy:
        return eigenstate_x(grid.epsilon[:, None], grid.A, x[None, :])
    return np.exp(1j * grid.epsilon[:, None] * x[None, :]) / math.sqrt(2.0 * math.pi)


def reconstruct(coeffs: SpectralCoefficients, grid: Grid2D, zeta: float | None = None) -> ComplexField2D:
    """
    Sum the eigenbasis expansion on ``grid``, optionally after evolving to ``zeta``.
    Rejects grids or distances outside the spectral grid's ghost-free window.
    """
    if zeta is not None:
        coeffs = evolve_in_eigenbasis(coeffs, zeta - coeffs.zeta)
    sgrid = coeffs.grid
    if abs(coeffs.zeta) > sgrid.zeta_max + 1e-12:
        raise SpectralTailError(f"zeta={coeffs.zeta:g} lies beyond the ghost-free range {sgrid.zeta_max:g}; rebuild with a larger zeta_max")
    if grid.extent_x > sgrid.extent_x + 1e-12 or grid.extent_y > sgrid.extent_y + 1e-12:
        raise SpectralTailError("target grid is wider than the spectral grid's ghost-free window")
    if not (_tails_ok(coeffs.c) and _tails_ok(coeffs.d)):
        raise SpectralTailError("spectral coefficients are truncated at the grid ends")

    basis_x = _x_basis(sgrid, grid.x) * sgrid.d_epsilon
    basis_y = np.exp(1j * sgrid.k[:, None] * grid.y[None, :]) / math.sqrt(2.0 * math.pi) * sgrid.d_k
    values = np.zeros(grid.shape, dtype=complex)
    for t, (_, _, weight) in enumerate(coeffs.terms):
        values += weight * np.outer(coeffs.d[t] @ basis_y, coeffs.c[t] @ basis_x)
    label = coeffs.mode.label if coeffs.mode is not None else None
    return ComplexField2D(grid=grid, values=values, zeta=coeffs.zeta, A=sgrid.A, normalized=False, mode=label)


def display_scale(m: int) -> float:
    """Plotting factor 1 / (2^(m/2) sqrt(m!)) applied to coefficient profiles for display."""
    return 1.0 / (2.0 ** (m / 2.0) * math.sqrt(math.factorial(m)))


__all__ = [
    "SpectralGrid",
    "SpectralCoefficients",
    "eigenstate_x",
    "plane_wave_coeff",
    "expansion_coeff_x",
    "expansion_coeff_y",
    "energy_centroid",
    "build_spectral_grid",
    "analyze",
    "evolve_in_eigenbasis",
    "reconstruct",
    "display_scale",
]
