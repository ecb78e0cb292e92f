import os
from typing import Any, Dict, Optional

import yaml

from mdp.run_config import MdpConfig

CONFIG_DIRECTORY = os.path.dirname(os.path.abspath(__file__))
OUTPUT_PATHS_FILE = os.path.join(CONFIG_DIRECTORY, "output_paths.yaml")
YAML_EXTENSIONS = (".yaml", ".yml")


def load_configurations(directory: str = CONFIG_DIRECTORY) -> Dict[str, Any]:
    """
    Parse every YAML file in `directory`, keyed by file stem.

    With the default directory the keys are `config` (run, synthetic and
    logging defaults) and `output_paths`.

    :param directory: Folder to scan; other file types are ignored.
    :return: Parsed content per stem; an empty file maps to {}.
    """
    configurations = {}
    for filename in sorted(os.listdir(directory)):
        stem, extension = os.path.splitext(filename)
        if extension not in YAML_EXTENSIONS:
            continue
        if stem in configurations:
            raise ValueError(
                f"Config name '{stem}' is defined twice in {directory}")
        with open(os.path.join(directory, filename), 'r') as file:
            configurations[stem] = yaml.safe_load(file) or {}
    return configurations


def load_config_file(config_file: str) -> Dict[str, Any]:
    """A flat YAML mapping of run keys; an empty file is an empty mapping."""
    with open(config_file, 'r') as file:
        values = yaml.safe_load(file) or {}
    if not isinstance(values, dict):
        raise ValueError(
            f"{config_file} must hold a mapping of run keys, "
            f"found {type(values).__name__}")
    return values


def load_run_config(config_file: Optional[str] = None,
                    overrides: Optional[Dict[str, Any]] = None) -> MdpConfig:
    """
    Resolve a run configuration: defaults < config file < overrides.

    :param config_file: Optional user YAML file with run keys.
    :param overrides: Values set on the command line; None entries are
        treated as not set.
    """
    values = dict(load_configurations()["config"]["run"])
    if config_file:
        values.update(load_config_file(config_file))
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})
    return MdpConfig.from_dict(values)
