from enum import Enum


class ModeFamily(str, Enum):
    HG: str = "HG"
    LG: str = "LG"


class ScenarioKind(str, Enum):
    propagate: str = "propagate"
    interfere_grating: str = "interfere-grating"
    interfere_vortex: str = "interfere-vortex"
    currents: str = "currents"
    expand: str = "expand"
    validate: str = "validate"


class HeatmapKind(str, Enum):
    density: str = "density"
    phase: str = "phase"


class OAMComponent(str, Enum):
    x: str = "x"
    y: str = "y"
    z: str = "z"


__all__ = ["ModeFamily", "ScenarioKind", "HeatmapKind", "OAMComponent"]
