import os

import yaml


class PathBuilder:
    """Resolves logical output keys to files under <out_dir>/<run_name>."""

    def __init__(self, out_dir: str, run_name: str, config_file: str):
        self.out_dir = out_dir
        self.run_name = run_name
        self.config = PathBuilder._load_config(config_file)

    @staticmethod
    def _load_config(config_file: str) -> dict:
        with open(config_file, 'r') as file:
            return yaml.safe_load(file)

    def _run_base(self, *parts: str) -> str:
        return os.path.join(
            *[part for part in [self.out_dir, self.run_name] + list(parts)
              if part])

    def get_output_path(self, *keys: str) -> str:
        try:
            path = self.config
            for key in keys:
                path = path[key]
            if isinstance(path, dict):
                raise ValueError(
                    f"Invalid output path: {'/'.join(keys)}, "
                    "expected a string but found a dictionary")
            return self._run_base(path)
        except (KeyError, TypeError) as e:
            raise ValueError(
                f"Invalid output path: {'/'.join(keys)}") from e

    def get_run_directory(self) -> str:
        return self._run_base()
