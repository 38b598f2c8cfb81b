"""
Interferometers built from thin phase elements: the three-grating Mach-Zehnder, the COW
reference formula and the vortex-pair interferometer, plus fringe analysis of 1D cuts.
"""
import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from sqw.analytic import ModeSpec, initial_mode, mode_field, mode_values
from sqw.consts import NYQUIST_FRACTION, PLANCK_H
from sqw.logger import log_debug, log_warning
from sqw.numeric import SplitStepPlan, split_step_propagate
from sqw.physics import ComplexField2D, Grid2D, ParticleBeam, PotentialSpec, inner_product
from sqw.specfun import laguerre
from sqw.utils.errors import AliasingError, GridExitError, NoDominantPeakError, OverlapError

MIN_FRINGE_SAMPLES = 32
PAD_FACTOR = 16
MIN_CYCLES = 2.0
DOMINANCE_RATIO = 3.0
ENVELOPE_FLOOR = 0.1
DENSITY_LOSS_LIMIT = 1e-3
CROSSING_FLOOR = 1e-6


class PhaseElement(BaseModel):
    """Thin grating idealised as exp(i sign k_T x~) applied at ``zeta_position``."""
    model_config = ConfigDict(frozen=True)

    k_T: float = Field(allow_inf_nan=False)
    zeta_position: float = Field(default=0.0, allow_inf_nan=False)
    sign: Literal[1, -1] = 1


@dataclass(frozen=True, eq=False)
class Interferogram:
    """
    Fringe cut and its metrics. ``samples`` rows are (x~, intensity). ``fringe_spacing`` and
    ``phase_shift`` are None when no dominant spatial frequency was found.
    """
    samples: np.ndarray
    visibility: float
    fringe_spacing: float | None = None
    phase_shift: float | None = None
    dominant_peak: bool = False


@dataclass(frozen=True, eq=False)
class GratingResult:
    interferogram: Interferogram
    measured_phase: float
    predicted_phase: float
    arms: tuple[ComplexField2D, ComplexField2D]
    crossing: ComplexField2D
    density_loss: float
    predicted_phase_si: float | None = None


@dataclass(frozen=True, eq=False)
class VortexResult:
    field: ComplexField2D
    interferogram: Interferogram
    cut_y: float
    window: tuple[float, float]
    modes: tuple[ModeSpec, ModeSpec]


def apply_phase_element(field: ComplexField2D, element: PhaseElement) -> ComplexField2D:
    if not math.isclose(element.zeta_position, field.zeta, rel_tol=0.0, abs_tol=1e-9):
        raise ValueError(f"element at zeta={element.zeta_position:g} does not sit on the field plane zeta={field.zeta:g}")
    grid = field.grid
    if abs(element.k_T) >= NYQUIST_FRACTION * grid.nyquist_x:
        raise AliasingError(
            f"kick {element.k_T:g} exceeds {NYQUIST_FRACTION:.0%} of the x Nyquist wavenumber {grid.nyquist_x:.3g}; refine the grid"
        )
    if element.k_T == 0.0:
        return field
    kick = np.exp(1j * element.sign * element.k_T * grid.x)[None, :]
    return field.replace(values=field.values * kick)


def _parabolic_offset(left: float, centre: float, right: float) -> float:
    denominator = left - 2.0 * centre + right
    if denominator == 0.0:
        return 0.0
    return 0.5 * (left - right) / denominator


def fringe_metrics(cut, x_ref: float | None = None, require_peak: bool = False) -> Interferogram:
    """
    Fringe spacing, phase and visibility of an intensity cut given as (x~, intensity) rows on a
    uniform, increasing x~ axis.

    The spacing comes from the strongest spatial frequency above two cycles per window in a
    Hann-windowed, zero-padded spectrum, refined by a three-point parabola. The phase is the
    argument of the windowed transform at that frequency, with x~ measured from ``x_ref``
    (window centre by default), so I ~ cos(2 pi (x~ - x_ref) / spacing + phase). Visibility is
    (Imax - Imin) / (Imax + Imin) over the central half of the cut.
    """
    samples = np.asarray(cut, dtype=float)
    if samples.ndim != 2 or samples.shape[1] != 2:
        raise ValueError("cut must be a sequence of (x, intensity) pairs")
    if samples.shape[0] < MIN_FRINGE_SAMPLES:
        raise ValueError(f"fringe analysis needs at least {MIN_FRINGE_SAMPLES} samples, got {samples.shape[0]}")
    if not np.all(np.isfinite(samples)):
        raise ValueError("cut contains non-finite values")
    x, intensity = samples[:, 0], samples[:, 1]
    steps = np.diff(x)
    dx = float(steps.mean())
    if dx <= 0 or not np.allclose(steps, dx, rtol=1e-6, atol=0.0):
        raise ValueError("cut must be sampled on a uniform increasing axis")

    n = x.size
    quarter = n // 4
    core = intensity[quarter: n - quarter]
    top, bottom = float(core.max()), float(core.min())
    visibility = (top - bottom) / (top + bottom) if top + bottom > 0 else 0.0
    visibility = min(max(visibility, 0.0), 1.0)

    ref = 0.5 * (x[0] + x[-1]) if x_ref is None else float(x_ref)
    signal = (intensity - intensity.mean()) * np.hanning(n)
    nfft = PAD_FACTOR * n
    spectrum = np.fft.rfft(signal, nfft)
    power = np.abs(spectrum) ** 2
    df = 1.0 / (nfft * dx)
    span = n * dx
    first = max(int(math.ceil(MIN_CYCLES / span / df)), 1)

    def _no_peak(reason: str) -> Interferogram:
        if require_peak:
            raise NoDominantPeakError(reason)
        log_debug(reason)
        return Interferogram(samples=samples, visibility=visibility)

    if first >= power.size - 1:
        return _no_peak("cut too short to resolve two fringes")
    peak = first + int(np.argmax(power[first:-1]))
    lobe = 2 * PAD_FACTOR
    lo, hi = max(peak - lobe, first), min(peak + lobe + 1, power.size)
    lobe_power = float(power[lo:hi].sum())
    rest = float(power[first:].sum()) - lobe_power
    if rest > 0 and lobe_power / rest < DOMINANCE_RATIO:
        return _no_peak(f"no dominant fringe frequency (peak/background = {lobe_power / rest:.2f})")

    magnitude = np.abs(spectrum)
    offset = _parabolic_offset(magnitude[peak - 1], magnitude[peak], magnitude[peak + 1]) if peak > 0 else 0.0
    frequency = (peak + offset) * df
    if frequency <= 0:
        return _no_peak("fringe frequency collapsed to zero")
    phase = float(np.angle(np.sum(signal * np.exp(-2j * math.pi * frequency * (x - ref)))))
    return Interferogram(
        samples=samples,
        visibility=visibility,
        fringe_spacing=1.0 / frequency,
        phase_shift=phase,
        dominant_peak=True,
    )


def _cut_metrics(x: np.ndarray, intensity: np.ndarray, x_ref: float | None = None) -> Interferogram:
    samples = np.column_stack([x, intensity])
    if x.size < MIN_FRINGE_SAMPLES:
        log_warning(f"only {x.size} samples across the fringe window; reporting visibility only")
        core = intensity[x.size // 4: x.size - x.size // 4] if x.size >= 4 else intensity
        total = core.max() + core.min()
        return Interferogram(samples=samples, visibility=float((core.max() - core.min()) / total) if total > 0 else 0.0)
    return fringe_metrics(samples, x_ref=x_ref)


def _resample_row(values: np.ndarray, grid: Grid2D, xs: np.ndarray) -> np.ndarray:
    """Trigonometric interpolation of one periodic grid row at arbitrary x~."""
    k = grid.kx.copy()
    k[grid.nx // 2] = 0.0
    spectrum = np.fft.fft(values)
    return np.exp(1j * np.outer(xs - grid.x[0], k)) @ spectrum / grid.nx


def _window(weights: np.ndarray) -> tuple[int, int]:
    inside = np.flatnonzero(weights >= ENVELOPE_FLOOR * weights.max())
    return int(inside[0]), int(inside[-1])


def grating_phase(k_T: float, A: float, zeta_total: float) -> float:
    """Phase difference between the arms of the three-grating interferometer, k_T A zeta^2 / 2."""
    return 0.5 * k_T * A * zeta_total**2


def grating_phase_si(p_T: float, beam: ParticleBeam, alpha: float, z: float) -> float:
    return p_T * beam.mass * alpha * z**2 / (2.0 * beam.hbar * beam.p0**2)


def cow_phase(lambda_dB: float, g: float, mass: float, d: float, a: float, theta: float, phi: float) -> float:
    """Colella-Overhauser-Werner phase 4 pi lambda g m^2 d (d + a cos theta) tan theta sin phi / h^2."""
    if min(lambda_dB, mass, d, a) < 0:
        raise ValueError("wavelength, mass and lengths must be non-negative")
    if abs(theta) >= 0.5 * math.pi:
        raise ValueError(f"Bragg angle must satisfy |theta| < pi/2, got {theta}")
    return (
        4.0 * math.pi * lambda_dB * g * mass**2 * d * (d + a * math.cos(theta)) * math.tan(theta) * math.sin(phi)
        / PLANCK_H**2
    )


def kick_shear(k_T: float, zeta: float, A: float = 0.0) -> tuple[float, float]:
    """
    Displacement and constant phase relating kick-then-propagate to propagate-then-kick:
    U K psi = exp(i phase) exp(i k_T x~) (U psi)(x~ - displacement).
    """
    return 0.5 * k_T * zeta, -0.25 * k_T**2 * zeta - 0.5 * k_T * A * zeta**2


def grating_interferometer(A: float, k_T: float, zeta_total: float, grid: Grid2D,
                           beam: ParticleBeam | None = None, mode: ModeSpec | None = None,
                           steps_per_rayleigh: int = 64, absorber_width: float = 0.1,
                           samples: int = 1024) -> GratingResult:
    """
    Three-grating interferometer: arms split by +/-k_T at zeta = 0, redirected by -/+2 k_T at
    zeta_total / 2 and recombined by +/-k_T at zeta_total. Each arm is propagated separately
    with the split-step solver; the measured phase is arg<arm_plus|arm_minus> after recombination.
    The interferogram is the density cut through the overlapping arms just before the last element,
    resampled at ``samples`` points by trigonometric interpolation of the grid row.
    """
    if not zeta_total > 0:
        raise ValueError(f"zeta_total must be positive, got {zeta_total}")
    mode = mode or ModeSpec.hg(0, 0)
    psi0 = initial_mode(mode, grid)
    plan = SplitStepPlan(grid=grid, A=A, steps_per_rayleigh=steps_per_rayleigh, absorber_width=absorber_width)
    half = 0.5 * zeta_total

    arms = []
    before = []
    worst_loss = 0.0
    for sign in (1, -1):
        field = apply_phase_element(psi0, PhaseElement(k_T=k_T, zeta_position=0.0, sign=sign))
        field = split_step_propagate(field, plan, half)
        field = apply_phase_element(field, PhaseElement(k_T=2.0 * k_T, zeta_position=half, sign=-sign))
        field = split_step_propagate(field, plan, half)
        loss = 1.0 - field.norm_squared()
        worst_loss = max(worst_loss, loss)
        if loss > DENSITY_LOSS_LIMIT:
            raise GridExitError(
                f"arm {'+' if sign > 0 else '-'} lost {loss:.2e} of its density at the grid edge; "
                f"enlarge the extents beyond {abs(k_T) * zeta_total / 4 + abs(A) * zeta_total**2 / 2 + 4:.3g}"
            )
        before.append(field)
        arms.append(apply_phase_element(field, PhaseElement(k_T=k_T, zeta_position=zeta_total, sign=sign)))

    measured = float(np.angle(inner_product(arms[0], arms[1])))
    predicted = grating_phase(k_T, A, zeta_total)
    log_debug(f"grating interferometer: measured {measured:+.6e}, predicted {predicted:+.6e}")

    crossing = before[0].replace(values=(before[0].values + before[1].values) / math.sqrt(2.0), normalized=False)
    envelope = np.abs(before[0].values) ** 2 + np.abs(before[1].values) ** 2
    row = int(np.argmax(envelope.max(axis=1)))
    lo, hi = _window(envelope[row])
    xs = np.linspace(grid.x[lo], grid.x[hi], samples if hi > lo else 1)
    cut = np.abs(_resample_row(crossing.values[row], grid, xs)) ** 2
    interferogram = _cut_metrics(xs, cut)

    predicted_si = None
    if beam is not None and A != 0.0:
        alpha = PotentialSpec.from_reduced(A, beam).alpha
        p_T = k_T * beam.hbar / beam.w0
        predicted_si = grating_phase_si(p_T, beam, alpha, beam.z_from_zeta(zeta_total))

    return GratingResult(
        interferogram=interferogram,
        measured_phase=measured,
        predicted_phase=predicted,
        arms=(arms[0], arms[1]),
        crossing=crossing,
        density_loss=worst_loss,
        predicted_phase_si=predicted_si,
    )


def ring_radius(ell: int, p: int = 0) -> float:
    """Radius of the brightest ring of LG(ell, p) at the waist; sqrt(|ell| / 2) when p = 0."""
    if p < 0:
        raise ValueError(f"radial index must be non-negative, got {p}")
    if p == 0:
        return math.sqrt(abs(ell) / 2.0)
    r = np.linspace(0.0, 2.0 + math.sqrt(2 * p + abs(ell) + 1.0), 20001)
    profile = (2.0 * r**2) ** abs(ell) * laguerre(p, abs(ell), 2.0 * r**2) ** 2 * np.exp(-2.0 * r**2)
    return float(r[np.argmax(profile)])


def vortex_interfere(ell: int, p: int, separation: float, A: float, zeta: float, grid: Grid2D,
                     frame: Literal["lab", "comoving"] = "lab", samples: int = 1024) -> VortexResult:
    """
    LG(+ell, p) displaced to x~ = -separation and LG(-ell, p) displaced to +separation, propagated
    to ``zeta``. The fringe cut runs along x~ on the row where min(rho_+, rho_-) peaks, over the
    window where that minimum stays above 10% of its peak, sampled analytically. In the lab frame
    phases refer to x~ = 0; in the comoving frame to the classical centroid -A zeta^2 / 2.
    """
    if not separation > 0:
        raise ValueError(f"separation must be positive, got {separation}")
    if frame not in ("lab", "comoving"):
        raise ValueError(f"unknown frame {frame!r}")
    plus = ModeSpec.lg(ell, p, offset_x=-separation)
    minus = ModeSpec.lg(-ell, p, offset_x=separation)
    psi_plus = mode_values(plus, grid, A, zeta)
    psi_minus = mode_values(minus, grid, A, zeta)
    rho_plus, rho_minus = np.abs(psi_plus) ** 2, np.abs(psi_minus) ** 2

    overlap = np.minimum(rho_plus, rho_minus)
    peak = max(rho_plus.max(), rho_minus.max())
    if overlap.max() < CROSSING_FLOOR * peak:
        raise OverlapError(
            f"beams barely cross at zeta={zeta:g} (crossing/peak = {overlap.max() / peak:.1e}); "
            "propagate further or reduce the separation"
        )
    # the pair is mirror-symmetric in y; take the upper crossing
    upper = np.flatnonzero(grid.y >= 0.0)
    row = int(upper[np.argmax(overlap[upper].max(axis=1))])
    lo, hi = _window(overlap[row])
    cut_y = float(grid.y[row])
    x_lo, x_hi = float(grid.x[lo]), float(grid.x[hi])

    xs = np.linspace(x_lo, x_hi, samples)
    total = mode_field(plus, xs, cut_y, A, zeta) + mode_field(minus, xs, cut_y, A, zeta)
    intensity = np.abs(total) ** 2
    shift = -0.5 * A * zeta**2
    x_ref = 0.0 if frame == "lab" else shift
    interferogram = _cut_metrics(xs, intensity, x_ref=x_ref)
    if not interferogram.dominant_peak:
        log_warning(f"vortex pair LG(+/-{ell},{p}): no dominant fringe frequency in the crossing")

    field = ComplexField2D(grid=grid, values=psi_plus + psi_minus, zeta=zeta, A=A, mode=f"{plus.label}+{minus.label}")
    return VortexResult(
        field=field.normalize(),
        interferogram=interferogram,
        cut_y=cut_y,
        window=(x_lo, x_hi),
        modes=(plus, minus),
    )


__all__ = [
    "PhaseElement",
    "Interferogram",
    "GratingResult",
    "VortexResult",
    "apply_phase_element",
    "fringe_metrics",
    "grating_phase",
    "grating_phase_si",
    "cow_phase",
    "kick_shear",
    "grating_interferometer",
    "ring_radius",
    "vortex_interfere",
]
