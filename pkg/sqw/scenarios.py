"""
Scenario runners behind the CLI. Each runner writes snapshots, heatmaps and CSV tables into the
output directory; run_scenario wraps them with the directory lock, cleanup on failure and the
manifest.
"""
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np
import pandas as pd
from filelock import FileLock, Timeout

from sqw.analytic import classical_centroid, initial_mode, propagate_mode
from sqw.consts import SNAPSHOT_SUFFIX, THREADS_ENV, ExitCode, OutputDir
from sqw.interfere import grating_interferometer, ring_radius, vortex_interfere
from sqw.logger import (
    configure_file_logging,
    detach_file_logging,
    log_info,
    log_running,
    log_start,
    log_success,
    log_warning,
)
from sqw.numeric import SplitStepPlan, kernel_propagate, split_step_trajectory
from sqw.observables import center_of_mass, current_density, oam_expectation, trace_current_lines
from sqw.physics import ComplexField2D, Grid2D, ParticleBeam, PotentialSpec, l2_distance
from sqw.spectral import analyze, display_scale, reconstruct
from sqw.utils.configs.modes import HeatmapKind, ScenarioKind
from sqw.utils.configs.scenarioconfigs import ScenarioConfig
from sqw.utils.errors import ConfigError, OutputError, SQWError
from sqw.utils.raster import render_heatmap
from sqw.utils.snapshot import write_snapshot
from sqw.utils.tables import MANIFEST_NAME, write_manifest, write_table
from sqw.validation import run_validation

LOCK_NAME = ".sqw.lock"


@dataclass
class RunContext:
    config: ScenarioConfig
    out_dir: Path
    threads: int = 1
    written: list[Path] = field(default_factory=list)

    @property
    def beam(self) -> ParticleBeam | None:
        return self.config.beam.to_beam() if self.config.beam is not None else None

    def path(self, sub: OutputDir | None, name: str) -> Path:
        directory = self.out_dir if sub is None else self.out_dir / sub.value
        directory.mkdir(parents=True, exist_ok=True)
        target = directory / name
        self.written.append(target)
        return target

    def snapshot(self, field: ComplexField2D, stem: str, heatmaps: bool = True) -> None:
        write_snapshot(field, self.path(OutputDir.SNAPSHOTS_DIR, stem + SNAPSHOT_SUFFIX))
        if heatmaps:
            for kind in HeatmapKind:
                render_heatmap(field, kind, self.path(OutputDir.HEATMAPS_DIR, f"{stem}_{kind.value}.pgm"))

    def table(self, frame: pd.DataFrame, name: str) -> Path:
        return write_table(frame, self.path(OutputDir.TABLES_DIR, name))

    def map(self, fn: Callable, items: list) -> list:
        """Evaluate independent sweep points, results in input order."""
        if self.threads <= 1 or len(items) <= 1:
            return [fn(item) for item in items]
        with ThreadPoolExecutor(max_workers=self.threads) as pool:
            return list(pool.map(fn, items))


@dataclass
class RunResult:
    exit_code: int
    out_dir: Path
    manifest: Path | None
    files: list[Path]
    summary: pd.DataFrame | None = None


def resolve_threads(threads: int | None) -> int:
    """CLI value, else the SQW_THREADS environment variable, else 1."""
    if threads is None:
        raw = os.environ.get(THREADS_ENV)
        if raw is None or raw.strip() == "":
            return 1
        try:
            threads = int(raw)
        except ValueError as exc:
            raise ConfigError(f"{THREADS_ENV}={raw!r} is not an integer") from exc
    if threads < 1:
        raise ConfigError(f"thread count must be at least 1, got {threads}")
    return threads


def _si_potential(ctx: RunContext, A: float) -> float | None:
    beam = ctx.beam
    if beam is None:
        return None
    return PotentialSpec.from_reduced(A, beam).alpha


def _add_si_columns(ctx: RunContext, frame: pd.DataFrame, lengths: tuple[str, ...] = (), zeta: str | None = "zeta") -> None:
    """Metre columns next to reduced ones: ``z_m`` from ``zeta`` and ``<name>_m`` for each transverse length."""
    beam = ctx.beam
    if beam is None:
        return
    if zeta is not None:
        frame["z_m"] = beam.z_from_zeta(frame[zeta])
    for name in lengths:
        frame[f"{name}_m"] = beam.x_from_reduced(frame[name])


def _tag(value: float) -> str:
    return f"{value:+.6g}".replace(".", "p").replace("+", "p").replace("-", "m")


def _run_propagate(ctx: RunContext) -> pd.DataFrame:
    cfg = ctx.config
    mode = cfg.mode.to_spec()
    grid = cfg.grid.to_grid()
    A = cfg.reduced_A
    zetas = list(cfg.propagation.zeta)
    method = cfg.propagation.method
    log_running(f"propagating {mode.label} with A={A:g} over {len(zetas)} planes ({method})")

    if method == "analytic":
        fields = ctx.map(lambda z: propagate_mode(mode, A, z, grid), zetas)
    elif method == "split-step":
        plan = SplitStepPlan(grid=grid, A=A, **cfg.split_step.model_dump())
        fields = split_step_trajectory(initial_mode(mode, grid), plan, zetas)
    else:
        start = initial_mode(mode, grid)
        fields = ctx.map(lambda z: start if z == 0 else kernel_propagate(start, A, z).normalize(), zetas)

    rows = []
    for index, (zeta, psi) in enumerate(zip(zetas, fields)):
        ctx.snapshot(psi, f"propagate_{index:03d}", heatmaps=cfg.propagation.heatmaps)
        cx, cy = center_of_mass(psi)
        normed = psi if psi.normalized else psi.normalize()
        rows.append({
            "zeta": zeta,
            "x_centroid": cx,
            "y_centroid": cy,
            "x_classical": float(classical_centroid(A, zeta, mode.offset_x)),
            "norm": psi.norm_squared(),
            "lz": oam_expectation(normed, "z"),
        })
    frame = pd.DataFrame(rows)
    _add_si_columns(ctx, frame, ("x_centroid", "y_centroid", "x_classical"))
    ctx.table(frame, "centroid.csv")
    return frame


def _run_grating(ctx: RunContext) -> pd.DataFrame:
    cfg = ctx.config
    grid = cfg.grid.to_grid()
    settings = cfg.interferometer
    zetas = list(cfg.sweep.zeta_total) or [settings.zeta_total]
    points = [(A, z) for A in cfg.A_values() for z in zetas]
    log_running(f"grating interferometer over {len(points)} points, k_T={settings.k_T:g}")

    def one(point):
        A, zeta_total = point
        return grating_interferometer(A, settings.k_T, zeta_total, grid, beam=ctx.beam,
                                      mode=cfg.mode.to_spec(), absorber_width=settings.absorber_width,
                                      steps_per_rayleigh=cfg.split_step.steps_per_rayleigh)

    results = ctx.map(one, points)
    rows = []
    for (A, zeta_total), result in zip(points, results):
        stem = f"grating_A{_tag(A)}_z{_tag(zeta_total)}"
        ctx.snapshot(result.crossing, stem)
        gram = result.interferogram
        cut = pd.DataFrame(gram.samples, columns=["x", "intensity"])
        _add_si_columns(ctx, cut, ("x",), zeta=None)
        ctx.table(cut, f"{stem}_cut.csv")
        row = {
            "A": A,
            "k_T": settings.k_T,
            "zeta_total": zeta_total,
            "measured_phase": result.measured_phase,
            "predicted_phase": result.predicted_phase,
            "visibility": gram.visibility,
            "fringe_spacing": gram.fringe_spacing if gram.fringe_spacing is not None else math.nan,
            "density_loss": result.density_loss,
        }
        if ctx.beam is not None:
            row["alpha"] = _si_potential(ctx, A)
            row["predicted_phase_si"] = result.predicted_phase_si if result.predicted_phase_si is not None else 0.0
        rows.append(row)
    frame = pd.DataFrame(rows)
    _add_si_columns(ctx, frame, zeta="zeta_total")
    ctx.table(frame, "grating_phase.csv")
    return frame


def _vortex_grid(cfg: ScenarioConfig, ell: int, separation: float) -> Grid2D:
    base = cfg.grid.to_grid()
    if not cfg.vortex.auto_grid:
        return base
    zeta = cfg.vortex.zeta
    reach = separation + (ring_radius(ell, cfg.vortex.p) + 3.0) * math.sqrt(1.0 + zeta**2)
    reach += 0.5 * max(abs(a) for a in cfg.A_values()) * zeta**2
    return Grid2D(nx=base.nx, ny=base.ny, extent_x=reach, extent_y=reach)


def _run_vortex(ctx: RunContext) -> pd.DataFrame:
    cfg = ctx.config
    vortex = cfg.vortex
    ells = list(cfg.sweep.ell) or [vortex.ell]
    A_values = cfg.A_values()
    points = [(ell, A) for ell in ells for A in A_values]
    log_running(f"vortex pairs: ell in {ells}, {len(A_values)} potential values, zeta={vortex.zeta:g}")

    def separation(ell: int) -> float:
        return vortex.separation or vortex.separation_factor * max(ring_radius(ell, vortex.p), 0.5)

    def one(point):
        ell, A = point
        d = separation(ell)
        return vortex_interfere(ell, vortex.p, d, A, vortex.zeta, _vortex_grid(cfg, ell, d),
                                frame=vortex.frame, samples=vortex.samples)

    results = ctx.map(one, points)
    rows = []
    for (ell, A), result in zip(points, results):
        stem = f"vortex_l{ell}_A{_tag(A)}"
        ctx.snapshot(result.field, stem)
        gram = result.interferogram
        cut = pd.DataFrame(gram.samples, columns=["x", "intensity"])
        _add_si_columns(ctx, cut, ("x",), zeta=None)
        ctx.table(cut, f"{stem}_cut.csv")
        rows.append({
            "ell": ell,
            "A": A,
            "zeta": vortex.zeta,
            "separation": separation(ell),
            "cut_y": result.cut_y,
            "fringe_spacing": gram.fringe_spacing if gram.dominant_peak else math.nan,
            "phase_shift": gram.phase_shift if gram.dominant_peak else math.nan,
            "visibility": gram.visibility,
        })
    frame = pd.DataFrame(rows)
    frame["phase_unwrapped"] = math.nan
    summary = []
    for ell in ells:
        sel = frame["ell"] == ell
        phases = frame.loc[sel, "phase_shift"].to_numpy()
        if np.all(np.isfinite(phases)):
            unwrapped = np.unwrap(phases)
            frame.loc[sel, "phase_unwrapped"] = unwrapped
            A_sel = frame.loc[sel, "A"].to_numpy()
            rate = float(np.polyfit(A_sel, unwrapped, 1)[0]) if len(A_sel) > 1 else math.nan
        else:
            rate = math.nan
        summary.append({
            "ell": ell,
            "fringe_spacing": float(frame.loc[sel, "fringe_spacing"].iloc[0]),
            "shift_rate": rate,
        })
    _add_si_columns(ctx, frame, ("separation", "cut_y", "fringe_spacing"))
    ctx.table(frame, "vortex_fringes.csv")
    summary_frame = pd.DataFrame(summary)
    _add_si_columns(ctx, summary_frame, ("fringe_spacing",), zeta=None)
    ctx.table(summary_frame, "vortex_sensitivity.csv")
    spacing = summary_frame["fringe_spacing"].to_numpy()
    if len(ells) > 1 and np.all(np.isfinite(spacing)):
        exponent = float(np.polyfit(np.log(np.abs(summary_frame["ell"])), np.log(spacing), 1)[0])
        log_info(f"fringe spacing scales as |ell|^{exponent:.3f}")
    return frame


def _run_currents(ctx: RunContext) -> pd.DataFrame:
    cfg = ctx.config
    mode = cfg.mode.to_spec()
    grid = cfg.grid.to_grid()
    A = cfg.reduced_A
    currents = cfg.currents
    lines = trace_current_lines(mode, A, (currents.zeta_start, currents.zeta_end), currents.seeds,
                                grid=grid, step=currents.step)
    log_running(f"traced {len(lines)} current lines of {mode.label}")
    rows = []
    for index, line in enumerate(lines):
        for x, y, zeta in line.points:
            rows.append({"line": index, "zeta": zeta, "x": x, "y": y, "exited": line.exited})
    frame = pd.DataFrame(rows, columns=["line", "zeta", "x", "y", "exited"])
    _add_si_columns(ctx, frame, ("x", "y"))
    ctx.table(frame, "current_lines.csv")

    for label, zeta in (("start", currents.zeta_start), ("end", currents.zeta_end)):
        psi = propagate_mode(mode, A, zeta, grid)
        ctx.snapshot(psi, f"currents_{label}")
        flux = current_density(psi)
        X, Y = grid.mesh
        densities = pd.DataFrame({
            "x": X.ravel(), "y": Y.ravel(),
            "rho": flux.jz_proxy.ravel(), "jx": flux.jx.ravel(), "jy": flux.jy.ravel(),
        })
        _add_si_columns(ctx, densities, ("x", "y"), zeta=None)
        ctx.table(densities, f"current_density_{label}.csv")
    return frame


def _run_expand(ctx: RunContext) -> pd.DataFrame:
    cfg = ctx.config
    mode = cfg.mode.to_spec()
    grid = cfg.grid.to_grid()
    A = cfg.reduced_A
    spectral = cfg.spectral
    coeffs = analyze(mode, A, grid, zeta_max=spectral.zeta_max, method=spectral.method)
    sgrid = coeffs.grid
    x_axis = "epsilon" if sgrid.airy else "k_x"
    log_running(f"{mode.label}: {sgrid.epsilon.size} x samples, {sgrid.k.size} k_y samples")

    for t, (m, n, _) in enumerate(coeffs.terms):
        ctx.table(pd.DataFrame({
            x_axis: sgrid.epsilon,
            "re": coeffs.c[t].real,
            "im": coeffs.c[t].imag,
            "abs": np.abs(coeffs.c[t]),
            "display_scale": display_scale(m),
        }), f"coefficients_x_term{t}_m{m}.csv")
        ctx.table(pd.DataFrame({
            "k": sgrid.k,
            "re": coeffs.d[t].real,
            "im": coeffs.d[t].imag,
            "abs": np.abs(coeffs.d[t]),
            "display_scale": display_scale(n),
        }), f"coefficients_y_term{t}_n{n}.csv")

    zetas = [z for z in cfg.propagation.zeta if abs(z) <= spectral.zeta_max]

    def one(zeta: float):
        psi = reconstruct(coeffs, grid, zeta)
        return psi, l2_distance(psi, propagate_mode(mode, A, zeta, grid))

    rows = []
    for index, (zeta, (psi, error)) in enumerate(zip(zetas, ctx.map(one, zetas))):
        ctx.snapshot(psi, f"expand_{index:03d}", heatmaps=cfg.propagation.heatmaps)
        rows.append({"zeta": zeta, "l2_error": error, "norm": psi.norm_squared()})
    frame = pd.DataFrame(rows, columns=["zeta", "l2_error", "norm"])
    _add_si_columns(ctx, frame)
    ctx.table(frame, "reconstruction.csv")
    return frame


def _run_validate(ctx: RunContext) -> pd.DataFrame:
    results = run_validation(ctx.threads)
    frame = pd.DataFrame([
        {"check": r.name, "value": r.value, "tolerance": r.tolerance, "passed": r.passed, "detail": r.detail}
        for r in results
    ])
    ctx.table(frame, "validation.csv")
    return frame


RUNNERS: dict[ScenarioKind, Callable[[RunContext], pd.DataFrame]] = {
    ScenarioKind.propagate: _run_propagate,
    ScenarioKind.interfere_grating: _run_grating,
    ScenarioKind.interfere_vortex: _run_vortex,
    ScenarioKind.currents: _run_currents,
    ScenarioKind.expand: _run_expand,
    ScenarioKind.validate: _run_validate,
}


def _cleanup(ctx: RunContext) -> None:
    try:
        for path in ctx.written:
            path.unlink(missing_ok=True)
        (ctx.out_dir / MANIFEST_NAME).unlink(missing_ok=True)
        for sub in OutputDir:
            directory = ctx.out_dir / sub.value
            if directory.is_dir() and not any(directory.iterdir()):
                directory.rmdir()
    except OSError as exc:
        log_warning(f"could not remove partial output in {ctx.out_dir}: {exc}")


def run_scenario(config: ScenarioConfig, out_dir: Path | str | None = None, threads: int = 1) -> RunResult:
    """
    Run ``config`` into ``out_dir`` (default: ``config.output``). Returns the exit status and the
    manifest; on any failure the files written so far are removed and the error propagates, with
    plain OS errors raised as OutputError.
    """
    out_dir = Path(out_dir if out_dir is not None else config.output)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OutputError(f"cannot create output directory {out_dir}: {exc}") from exc

    lock = FileLock(str(out_dir / LOCK_NAME))
    try:
        lock.acquire(timeout=0)
    except Timeout as exc:
        raise OutputError(f"{out_dir} is in use by another run") from exc

    ctx = RunContext(config=config, out_dir=out_dir, threads=threads)
    try:
        configure_file_logging(out_dir)
        log_start(f"{config.kind.value} into {out_dir}")
        summary = RUNNERS[config.kind](ctx)
        manifest = write_manifest(out_dir, ctx.written)
        exit_code = ExitCode.OK
        if config.kind == ScenarioKind.validate and not bool(summary["passed"].all()):
            exit_code = ExitCode.NUMERICAL
        log_success(f"{len(ctx.written)} files written; manifest at {manifest}")
        return RunResult(exit_code=int(exit_code), out_dir=out_dir, manifest=manifest,
                         files=list(ctx.written), summary=summary)
    except SQWError:
        _cleanup(ctx)
        raise
    except OSError as exc:
        _cleanup(ctx)
        raise OutputError(f"writing into {out_dir} failed: {exc}") from exc
    except BaseException:
        _cleanup(ctx)
        raise
    finally:
        detach_file_logging()
        lock.release()


__all__ = ["RunContext", "RunResult", "RUNNERS", "resolve_threads", "run_scenario"]
