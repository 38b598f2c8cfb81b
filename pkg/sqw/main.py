import json
from pathlib import Path

import pyfiglet
import typer
from rich.console import Console
from rich.table import Table

from sqw.consts import ExitCode
from sqw.logger import log_error, log_success, set_verbosity
from sqw.scenarios import RunResult, resolve_threads, run_scenario
from sqw.scripts.schema.schema_gen import create_examples, create_schema
from sqw.utils.configs.config_io import load_config, scenario_schema, validate_config
from sqw.utils.configs.modes import ScenarioKind
from sqw.utils.errors import SQWError
from sqw.utils.snapshot import read_snapshot_header

# Initialize Typer app
typer_app = typer.Typer(no_args_is_help=False, add_completion=False)
# Initialize Rich console
console = Console()


@typer_app.callback(invoke_without_command=True)
def main(ctx: typer.Context):
    """
    SQW CLI: structured matter waves in a linear potential.
    """
    if ctx.invoked_subcommand is None:
        ascii_art = pyfiglet.figlet_format("SQW", font="ansi_regular")
        console.print(ascii_art, style="bold green")
        console.print("Shape-preserving modes. Falling centroids. Measurable phases.", style="bold green")
        console.print("Type 'sqw --help' for more commands.", style="dim")


def _fail(exc: SQWError) -> None:
    log_error(str(exc))
    for line in getattr(exc, "diagnostics", []):
        console.print(f"  - {line}", style="red")
    raise typer.Exit(code=int(exc.exit_code))


def _report(result: RunResult) -> None:
    table = Table(title=f"Artifacts in {result.out_dir}")
    table.add_column("File", justify="left", style="cyan", no_wrap=True)
    table.add_column("Bytes", justify="right", style="magenta")
    for path in sorted(result.files):
        table.add_row(path.relative_to(result.out_dir).as_posix(), str(path.stat().st_size))
    console.print(table)


def _report_validation(result: RunResult) -> None:
    table = Table(title="Oracle checks")
    table.add_column("Check", justify="left", style="cyan", no_wrap=True)
    table.add_column("Value", justify="right", style="magenta")
    table.add_column("Tolerance", justify="right")
    table.add_column("Result", justify="center")
    for row in result.summary.itertuples(index=False):
        verdict = "[bold green]pass[/bold green]" if row.passed else "[bold red]fail[/bold red]"
        table.add_row(row.check, f"{row.value:.3e}", f"{row.tolerance:.1e}", verdict)
    console.print(table)


def _run(kind: ScenarioKind, config: Path | None, out: Path | None, threads: int | None,
         validate_only: bool, verbose: bool) -> None:
    set_verbosity(verbose)
    try:
        n_threads = resolve_threads(threads)
        if config is None:
            if kind != ScenarioKind.validate:
                console.print(f"'sqw {kind.value}' needs --config", style="bold red")
                raise typer.Exit(code=int(ExitCode.CONFIG))
            scenario = validate_config({}, kind, source="defaults")
        else:
            scenario = load_config(config, kind)
        if validate_only:
            console.print(f"[bold green]{config or 'defaults'}: valid {kind.value} config[/bold green]")
            return
        with console.status(f"[bold green]Running {kind.value}..."):
            result = run_scenario(scenario, out, n_threads)
    except SQWError as exc:
        _fail(exc)
        return
    if kind == ScenarioKind.validate:
        _report_validation(result)
    else:
        _report(result)
    if result.exit_code != ExitCode.OK:
        log_error(f"{kind.value} finished with exit code {result.exit_code}")
        raise typer.Exit(code=result.exit_code)
    log_success(f"manifest written to {result.manifest}")


CONFIG_HELP = "Scenario config (.json, .yaml or .yml)"
OUT_HELP = "Output directory (defaults to the config's 'output')"
THREADS_HELP = "Worker threads for sweeps (falls back to SQW_THREADS)"


@typer_app.command(name="propagate")
def propagate(
    config: Path = typer.Option(None, "--config", "-c", help=CONFIG_HELP),
    out: Path = typer.Option(None, "--out", "-o", help=OUT_HELP),
    threads: int = typer.Option(None, "--threads", "-t", help=THREADS_HELP),
    validate_only: bool = typer.Option(False, "--validate-only", help="Only validate the config"),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Debug logging"),
):
    """
    Propagate a mode and write snapshots, heatmaps and the centroid table
    """
    _run(ScenarioKind.propagate, config, out, threads, validate_only, verbose)


@typer_app.command(name="interfere-grating")
def interfere_grating(
    config: Path = typer.Option(None, "--config", "-c", help=CONFIG_HELP),
    out: Path = typer.Option(None, "--out", "-o", help=OUT_HELP),
    threads: int = typer.Option(None, "--threads", "-t", help=THREADS_HELP),
    validate_only: bool = typer.Option(False, "--validate-only", help="Only validate the config"),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Debug logging"),
):
    """
    Run the three-grating interferometer and tabulate the phase against A
    """
    _run(ScenarioKind.interfere_grating, config, out, threads, validate_only, verbose)


@typer_app.command(name="interfere-vortex")
def interfere_vortex(
    config: Path = typer.Option(None, "--config", "-c", help=CONFIG_HELP),
    out: Path = typer.Option(None, "--out", "-o", help=OUT_HELP),
    threads: int = typer.Option(None, "--threads", "-t", help=THREADS_HELP),
    validate_only: bool = typer.Option(False, "--validate-only", help="Only validate the config"),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Debug logging"),
):
    """
    Interfere LG pairs of opposite charge and measure fringe spacing and shifts
    """
    _run(ScenarioKind.interfere_vortex, config, out, threads, validate_only, verbose)


@typer_app.command(name="currents")
def currents(
    config: Path = typer.Option(None, "--config", "-c", help=CONFIG_HELP),
    out: Path = typer.Option(None, "--out", "-o", help=OUT_HELP),
    threads: int = typer.Option(None, "--threads", "-t", help=THREADS_HELP),
    validate_only: bool = typer.Option(False, "--validate-only", help="Only validate the config"),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Debug logging"),
):
    """
    Trace probability-current lines and dump current densities
    """
    _run(ScenarioKind.currents, config, out, threads, validate_only, verbose)


@typer_app.command(name="expand")
def expand(
    config: Path = typer.Option(None, "--config", "-c", help=CONFIG_HELP),
    out: Path = typer.Option(None, "--out", "-o", help=OUT_HELP),
    threads: int = typer.Option(None, "--threads", "-t", help=THREADS_HELP),
    validate_only: bool = typer.Option(False, "--validate-only", help="Only validate the config"),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Debug logging"),
):
    """
    Expand a mode over the Airy/plane-wave eigenbasis and reconstruct it
    """
    _run(ScenarioKind.expand, config, out, threads, validate_only, verbose)


@typer_app.command(name="validate")
def validate(
    config: Path = typer.Option(None, "--config", "-c", help=CONFIG_HELP),
    out: Path = typer.Option(None, "--out", "-o", help=OUT_HELP),
    threads: int = typer.Option(None, "--threads", "-t", help=THREADS_HELP),
    validate_only: bool = typer.Option(False, "--validate-only", help="Only validate the config"),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Debug logging"),
):
    """
    Run the oracle suite; exits 3 if any check fails
    """
    _run(ScenarioKind.validate, config, out, threads, validate_only, verbose)


@typer_app.command()
def init(
    directory: Path = typer.Option(Path("configs"), "--dir", "-d", help="Where to write the schema and examples"),
    force: bool = typer.Option(False, "--force", "-f", help="Overwrite existing example configs"),
):
    """
    Write the config schema and one example config per scenario.
    """
    tasks = []
    with console.status("[bold green]Writing configs..."):
        try:
            schema_path = create_schema(directory)
            tasks.append({"description": f"Wrote {schema_path}", "status": "completed"})
            for path, written in create_examples(directory, overwrite=force):
                tasks.append({"description": f"{'Wrote' if written else 'Kept existing'} {path}",
                              "status": "completed" if written else "skipped"})
        except OSError as e:
            tasks.append({"description": f"Failed to write into {directory}: {e}", "status": "failed"})

    status_styles = {"completed": "bold green", "failed": "bold red", "skipped": "bold yellow"}
    for task in tasks:
        console.print(f"[{status_styles[task['status']]}] - {task['description']} [/{status_styles[task['status']]}]")
    if any(task["status"] == "failed" for task in tasks):
        raise typer.Exit(code=int(ExitCode.IO))


@typer_app.command()
def schema():
    """
    Print the scenario config JSON schema.
    """
    typer.echo(json.dumps(scenario_schema(), indent=2, sort_keys=True))


@typer_app.command()
def inspect(snapshot: Path = typer.Argument(..., help="SQWF1 snapshot file")):
    """
    Show the metadata of a field snapshot.
    """
    try:
        header = read_snapshot_header(snapshot)
    except SQWError as exc:
        _fail(exc)
        return
    except OSError as exc:
        log_error(f"cannot read {snapshot}: {exc}")
        raise typer.Exit(code=int(ExitCode.IO))
    table = Table(title=str(snapshot))
    table.add_column("Field", justify="left", style="cyan", no_wrap=True)
    table.add_column("Value", justify="left", style="magenta")
    for key, value in sorted(header.model_dump().items()):
        table.add_row(key, str(value))
    console.print(table)


if __name__ == "__main__":
    typer_app()
