"""Experiment plumbing: run configuration, metrics CSV, self-checks and the CLI."""

from .config import ALGORITHMS, ConfigError, RunConfig, load_config
from .metrics import COLUMNS, SCHEMA_VERSION, MetricsRow, MetricsWriter, read_metrics
from .runner import RunResult, Runner, solve
from .selfcheck import SUITES, SuiteResult, run_selfcheck

__all__ = [
    "ALGORITHMS",
    "COLUMNS",
    "ConfigError",
    "MetricsRow",
    "MetricsWriter",
    "RunConfig",
    "RunResult",
    "Runner",
    "SCHEMA_VERSION",
    "SUITES",
    "SuiteResult",
    "load_config",
    "read_metrics",
    "run_selfcheck",
    "solve",
]
