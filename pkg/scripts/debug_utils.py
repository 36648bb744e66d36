"""Logging for the pgl2-invariants scripts.

Every script gets one DebugLogger. Its handlers sit on the ``pgl2_invariants``
logger, so messages from the library modules (``pgl2_invariants.invring``,
``pgl2_invariants.relcat``, ...) land in the same file and on the same
console as the script's own.

Log files go to ~/logs/pgl2-invariants/ unless the ``log_dir`` setting
names another directory. The console handler writes to stderr: stdout is
reserved for command output, which may be JSON.
"""

import logging
import os
import sys
import time
from contextlib import contextmanager
from datetime import datetime
from pathlib import Path
from typing import Iterator, Optional

ROOT_LOGGER = "pgl2_invariants"
DEFAULT_LOG_DIR = Path.home() / "logs" / "pgl2-invariants"
DEBUG_ENV = "PGL2_INVARIANTS_DEBUG"

FILE_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(funcName)s:%(lineno)d - %(message)s"
CONSOLE_FORMAT = "%(levelname)s: %(message)s"


def _reset_handlers(logger: logging.Logger) -> None:
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()


class DebugLogger:
    """A script's logger plus the shared handlers for the library modules."""

    def __init__(self, script_name: str, enable_debug: bool = False,
                 log_dir: Optional[str | Path] = None):
        """
        Args:
            script_name: Name of the script (e.g., 'pgl2_invariants', 'build_index')
            enable_debug: DEBUG level on the console instead of INFO
            log_dir: Directory for log files (default ~/logs/pgl2-invariants)
        """
        self.script_name = script_name
        self.enable_debug = enable_debug
        directory = Path(log_dir).expanduser() if log_dir else DEFAULT_LOG_DIR
        directory.mkdir(parents=True, exist_ok=True)
        stamp = datetime.now().strftime("%Y%m%d_%H%M%S")
        self.log_file = directory / f"{script_name}_{stamp}.log"

        level = logging.DEBUG if enable_debug else logging.INFO
        root = logging.getLogger(ROOT_LOGGER)
        _reset_handlers(root)
        root.setLevel(logging.DEBUG)

        # The file always gets everything.
        file_handler = logging.FileHandler(self.log_file, encoding="utf-8")
        file_handler.setLevel(logging.DEBUG)
        file_handler.setFormatter(logging.Formatter(FILE_FORMAT, datefmt="%Y-%m-%d %H:%M:%S"))
        root.addHandler(file_handler)

        console = logging.StreamHandler(sys.stderr)
        console.setLevel(level)
        console.setFormatter(logging.Formatter(CONSOLE_FORMAT))
        root.addHandler(console)

        self.logger = logging.getLogger(f"{ROOT_LOGGER}.{script_name}")
        self.logger.debug(f"Starting {script_name} (debug={enable_debug}), log file {self.log_file}")

    def debug(self, msg: str, *args, **kwargs):
        self.logger.debug(msg, *args, **kwargs)

    def info(self, msg: str, *args, **kwargs):
        self.logger.info(msg, *args, **kwargs)

    def warning(self, msg: str, *args, **kwargs):
        self.logger.warning(msg, *args, **kwargs)

    def error(self, msg: str, *args, **kwargs):
        self.logger.error(msg, *args, **kwargs)

    def exception(self, msg: str, *args, **kwargs):
        """Log at ERROR with the current traceback (file only shows it in full)."""
        self.logger.exception(msg, *args, **kwargs)

    def log_function_entry(self, func_name: str, **kwargs):
        if self.enable_debug:
            args_str = ", ".join(f"{k}={v}" for k, v in kwargs.items())
            self.logger.debug(f"ENTER {func_name}({args_str})")

    def log_function_exit(self, func_name: str, result=None):
        if self.enable_debug:
            self.logger.debug(f"EXIT {func_name} -> {result}")

    def log_variable(self, var_name: str, value):
        if self.enable_debug:
            self.logger.debug(f"VAR {var_name} = {value}")

    def log_run_config(self, config) -> None:
        """Write every field of a RunConfig to the log file, one per line."""
        for key, value in config.model_dump(mode="json").items():
            self.logger.debug(f"config {key} = {value}")

    def log_cache_stats(self, cache) -> None:
        if cache.enabled:
            self.logger.info(f"cache {cache.directory}: {cache.hits} hit(s), {cache.misses} miss(es)")
        else:
            self.logger.debug("cache disabled")

    @contextmanager
    def stage(self, label: str) -> Iterator[None]:
        """Time a block of work; the elapsed seconds go to the log at DEBUG."""
        started = time.monotonic()
        self.logger.debug(f"{label}: started")
        try:
            yield
        finally:
            self.logger.debug(f"{label}: {time.monotonic() - started:.2f}s")

    def print_log_location(self):
        print(f"\n📝 Logs written to: {self.log_file}")
        if os.name == "nt":
            print(f"   Open in Notepad: notepad {self.log_file}\n")
        else:
            print(f"   View with: less {self.log_file}\n")


def setup_logger(script_name: str, debug: bool = False,
                 log_dir: Optional[str | Path] = None) -> DebugLogger:
    """Set up logging for a script; see DebugLogger."""
    return DebugLogger(script_name, enable_debug=debug, log_dir=log_dir)


def enable_debug_mode(argv: Optional[list[str]] = None) -> bool:
    """True if PGL2_INVARIANTS_DEBUG is 1/true/yes or ``--debug`` is on the command line."""
    if os.environ.get(DEBUG_ENV, "").lower() in ("1", "true", "yes"):
        return True
    return "--debug" in (sys.argv if argv is None else argv)
