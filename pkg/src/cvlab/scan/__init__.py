"""Declarative experiment runner: configuration, grid execution and output."""

from .config import EXPERIMENTS, SCHEMA, ExperimentConfig, from_dict, load_config
from .plotdata import emit_plotdata
from .runner import RunResult, run

__all__ = [
    "EXPERIMENTS",
    "SCHEMA",
    "ExperimentConfig",
    "RunResult",
    "emit_plotdata",
    "from_dict",
    "load_config",
    "run",
]
