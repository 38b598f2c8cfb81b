from enum import Enum, IntEnum

# CODATA 2018 (h is exact since the 2019 SI redefinition)
PLANCK_H: float = 6.62607015e-34
HBAR: float = PLANCK_H / (2.0 * 3.141592653589793)
NEUTRON_MASS: float = 1.67492749804e-27
STANDARD_GRAVITY: float = 9.80665

ZETA_MIN: float = 1e-6
KERNEL_ZETA_MIN: float = 1e-3
KERNEL_GRID_CAP: int = 256
NYQUIST_FRACTION: float = 0.8
CAPTURE_THRESHOLD: float = 0.999
SPECTRAL_TAIL: float = 1e-8

SNAPSHOT_MAGIC: bytes = b"SQWF1"
SNAPSHOT_SUFFIX: str = ".sqwf"
THREADS_ENV: str = "SQW_THREADS"


class ExitCode(IntEnum):
    OK = 0
    CONFIG = 2
    NUMERICAL = 3
    IO = 4


class OutputDir(Enum):
    """
    Sub-directories created under a scenario's output directory.
    """
    SNAPSHOTS_DIR: str = "snapshots"
    HEATMAPS_DIR: str = "heatmaps"
    TABLES_DIR: str = "tables"
