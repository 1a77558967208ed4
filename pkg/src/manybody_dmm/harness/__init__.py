"""Experiment driver: presets, configuration files, data I/O and the CLI."""
from .config import ExperimentConfig, config_from_dict, load_config, preset, save_config
from .io import (BodyFile, TrajectoryWriter, load_bodies, read_bodies, read_ensemble,
                 resolve_data_path, write_bodies, write_ensemble)
from .run import Experiment, RunResult, build, run
