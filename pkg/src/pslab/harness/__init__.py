from .config import SCENARIOS, ExperimentConfig, load_config, make_config
from .output import emit_csv
from .scenarios import ExperimentResult, run_experiment

__all__ = ["SCENARIOS", "ExperimentConfig", "ExperimentResult", "emit_csv", "load_config",
           "make_config", "run_experiment"]
