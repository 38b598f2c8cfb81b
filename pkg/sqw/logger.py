import logging
from logging.handlers import RotatingFileHandler
from pathlib import Path

from rich.console import Console
from rich.logging import RichHandler

LOGFORMAT = "%(message)s"
LOGFILE = "sqw.log"

# Set up Rich console for rich logging
console = Console()
error_console = Console(stderr=True)

logger = logging.getLogger("sqw")
logger.setLevel(logging.INFO)
logger.propagate = False

rich_handler = RichHandler(console=error_console, markup=True, rich_tracebacks=True, show_path=False)
rich_handler.setFormatter(logging.Formatter(LOGFORMAT))
logger.addHandler(rich_handler)


def configure_file_logging(directory: Path | str) -> RotatingFileHandler:
    """
    Attach a rotating log file inside ``directory``. Any previously attached file handler is replaced.
    """
    for handler in list(logger.handlers):
        if isinstance(handler, RotatingFileHandler):
            logger.removeHandler(handler)
            handler.close()
    path = Path(directory) / LOGFILE
    path.parent.mkdir(parents=True, exist_ok=True)
    file_handler = RotatingFileHandler(path, maxBytes=1024 * 1024 * 10, backupCount=10)  # 10 MB
    file_handler.setFormatter(logging.Formatter(LOGFORMAT))
    logger.addHandler(file_handler)
    return file_handler


def detach_file_logging() -> None:
    for handler in list(logger.handlers):
        if isinstance(handler, RotatingFileHandler):
            logger.removeHandler(handler)
            handler.close()


def set_verbosity(verbose: bool) -> None:
    logger.setLevel(logging.DEBUG if verbose else logging.INFO)


# Logging functions
def log_start(message: str):
    logger.info(f"[bold green]Starting: {message}[/bold green]")


def log_running(message: str):
    logger.info(f"[bold blue]Running: {message}[/bold blue]")


def log_success(message: str):
    logger.info(f"[bold green]Success: {message}[/bold green]")


def log_error(message: str):
    logger.error(f"[bold red]Error: {message}[/bold red]")


def log_warning(message: str):
    logger.warning(f"[bold yellow]Warning: {message}[/bold yellow]")


def log_info(message: str):
    logger.info(f"[bold cyan]Info: {message}[/bold cyan]")


def log_debug(message: str):
    logger.debug(f"[bold magenta]Debug: {message}[/bold magenta]")
