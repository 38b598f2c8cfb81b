from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

from sqw.analytic import ModeSpec
from sqw.consts import NEUTRON_MASS
from sqw.physics import Finite, Grid2D, ParticleBeam, PositiveFinite, nondimensionalize
from sqw.utils.configs.modes import ModeFamily, ScenarioKind


class _Block(BaseModel):
    model_config = ConfigDict(extra="forbid")


class BeamConfig(_Block):
    """SI beam: mass (kg), either p0 (kg m/s) or the de Broglie wavelength (m), and waist w0 (m)."""
    mass: PositiveFinite = NEUTRON_MASS
    p0: PositiveFinite | None = None
    wavelength: PositiveFinite | None = None
    w0: PositiveFinite

    @model_validator(mode="after")
    def _one_momentum(self) -> "BeamConfig":
        if (self.p0 is None) == (self.wavelength is None):
            raise ValueError("give exactly one of p0 and wavelength")
        return self

    def to_beam(self) -> ParticleBeam:
        if self.p0 is not None:
            return ParticleBeam(mass=self.mass, p0=self.p0, w0=self.w0)
        return ParticleBeam.from_wavelength(self.mass, self.wavelength, self.w0)


class PotentialConfig(_Block):
    """Either the SI gradient ``alpha`` (J/m, needs a beam) or the reduced strength ``A``."""
    alpha: Finite | None = None
    A: Finite | None = None

    @model_validator(mode="after")
    def _one_strength(self) -> "PotentialConfig":
        if (self.alpha is None) == (self.A is None):
            raise ValueError("give exactly one of alpha (SI) and A (reduced)")
        return self


class ModeConfig(_Block):
    family: ModeFamily = ModeFamily.HG
    first: int = 0
    second: int = Field(default=0, ge=0)
    offset_x: Finite = 0.0
    offset_y: Finite = 0.0

    def to_spec(self) -> ModeSpec:
        return ModeSpec(family=self.family, first=self.first, second=self.second,
                        offset_x=self.offset_x, offset_y=self.offset_y)


class GridConfig(_Block):
    nx: int = Field(default=256, ge=8)
    ny: int = Field(default=256, ge=8)
    extent_x: PositiveFinite = 8.0
    extent_y: PositiveFinite = 8.0

    @model_validator(mode="after")
    def _even(self) -> "GridConfig":
        if self.nx % 2 or self.ny % 2:
            raise ValueError(f"grid counts must be even, got {self.nx}x{self.ny}")
        return self

    def to_grid(self) -> Grid2D:
        return Grid2D(nx=self.nx, ny=self.ny, extent_x=self.extent_x, extent_y=self.extent_y)


class PropagationConfig(_Block):
    zeta: list[Finite] = Field(default_factory=lambda: [0.0, 0.5, 1.0, 2.0], min_length=1)
    method: Literal["analytic", "split-step", "kernel"] = "analytic"
    heatmaps: bool = True


class SplitStepConfig(_Block):
    steps_per_rayleigh: int = Field(default=64, ge=16)
    absorber_width: float = Field(default=0.0, ge=0.0, lt=0.5)
    absorber_strength: PositiveFinite = 20.0


class InterferometerConfig(_Block):
    k_T: Finite = 4.0
    zeta_total: PositiveFinite = 1.0
    absorber_width: float = Field(default=0.1, ge=0.0, lt=0.5)


class VortexConfig(_Block):
    ell: int = 1
    p: int = Field(default=0, ge=0)
    separation: PositiveFinite | None = None
    separation_factor: PositiveFinite = 10.0
    zeta: PositiveFinite = 20.0
    samples: int = Field(default=1024, ge=32)
    frame: Literal["lab", "comoving"] = "lab"
    auto_grid: bool = True


class SpectralConfig(_Block):
    method: Literal["quadrature", "closed_form"] = "closed_form"
    zeta_max: PositiveFinite = 2.0


class CurrentsConfig(_Block):
    zeta_start: Finite = 0.0
    zeta_end: Finite = 2.0
    seeds: list[tuple[Finite, Finite]] = Field(default_factory=lambda: [(0.5, 0.0), (0.0, 0.7), (-0.9, 0.3)])
    step: PositiveFinite | None = None

    @model_validator(mode="after")
    def _increasing(self) -> "CurrentsConfig":
        if not self.zeta_end > self.zeta_start:
            raise ValueError("zeta_end must exceed zeta_start")
        return self


class SweepConfig(_Block):
    """Sweep axes; empty lists fall back to the single value of the scenario block."""
    A: list[Finite] = Field(default_factory=list)
    ell: list[int] = Field(default_factory=list)
    zeta_total: list[PositiveFinite] = Field(default_factory=list)


class ScenarioConfig(_Block):
    kind: ScenarioKind
    beam: BeamConfig | None = None
    potential: PotentialConfig = Field(default_factory=lambda: PotentialConfig(A=0.0))
    mode: ModeConfig = Field(default_factory=ModeConfig)
    grid: GridConfig = Field(default_factory=GridConfig)
    propagation: PropagationConfig = Field(default_factory=PropagationConfig)
    split_step: SplitStepConfig = Field(default_factory=SplitStepConfig)
    interferometer: InterferometerConfig = Field(default_factory=InterferometerConfig)
    vortex: VortexConfig = Field(default_factory=VortexConfig)
    spectral: SpectralConfig = Field(default_factory=SpectralConfig)
    currents: CurrentsConfig = Field(default_factory=CurrentsConfig)
    sweep: SweepConfig = Field(default_factory=SweepConfig)
    output: str = "sqw-out"

    @model_validator(mode="after")
    def _si_needs_beam(self) -> "ScenarioConfig":
        if self.potential.alpha is not None and self.beam is None:
            raise ValueError("potential.alpha is in SI units and needs a beam block")
        return self

    @property
    def is_si(self) -> bool:
        return self.beam is not None

    @property
    def reduced_A(self) -> float:
        if self.potential.A is not None:
            return self.potential.A
        return nondimensionalize(self.beam.to_beam(), self.potential.alpha).A

    def A_values(self) -> list[float]:
        return list(self.sweep.A) or [self.reduced_A]


__all__ = [
    "BeamConfig",
    "PotentialConfig",
    "ModeConfig",
    "GridConfig",
    "PropagationConfig",
    "SplitStepConfig",
    "InterferometerConfig",
    "VortexConfig",
    "SpectralConfig",
    "CurrentsConfig",
    "SweepConfig",
    "ScenarioConfig",
]
