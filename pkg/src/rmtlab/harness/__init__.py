"""Experiment configs, the replicate runner, reports and the ``rmtlab`` CLI."""
from .config import EXPERIMENT_KINDS, KIND_PARAMS, ExperimentConfig, load_config
from .experiments import run_experiment, spectrum_for
from .report import FORMATS, Report, emit

__all__ = [
    "EXPERIMENT_KINDS",
    "KIND_PARAMS",
    "ExperimentConfig",
    "FORMATS",
    "Report",
    "emit",
    "load_config",
    "run_experiment",
    "spectrum_for",
]
