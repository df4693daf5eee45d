from dataclasses import dataclass, fields, replace
from os import PathLike

import numpy as np

from .errors import ConfigError
from .globalvars import (DEFAULT_ENGINE, DEFAULT_HASH, DEFAULT_K, DEFAULT_KAPPA, DEFAULT_M, DEFAULT_SEED,
                         DEFAULT_T, DEMO_DICT_FILEPATH, ENGINES, HASH_ALGORITHMS, NOISE_P_GRID, TABLE_FILEPATH)


@dataclass(frozen=True)
class RunConfig:
    """
    Parameters shared by the command-line tools.

    Values come from the defaults below, then an optional `key=value` file, then
    command-line flags, each layer overriding the previous one.
    """
    dict_path: str = DEMO_DICT_FILEPATH
    table: str = TABLE_FILEPATH
    seed: int = DEFAULT_SEED
    t: int = DEFAULT_T
    m: int = DEFAULT_M
    k: int = DEFAULT_K
    kappa: int = DEFAULT_KAPPA
    hash_algorithm: str = DEFAULT_HASH
    engine: str = DEFAULT_ENGINE
    p_grid: str = NOISE_P_GRID
    out: str | None = None
    shots: int | None = None
    n_jobs: int = 1

    def __post_init__(self):
        if self.hash_algorithm not in HASH_ALGORITHMS:
            raise ConfigError(f"hash must be one of {HASH_ALGORITHMS}, got {self.hash_algorithm!r}")
        if self.engine not in ENGINES:
            raise ConfigError(f"engine must be one of {ENGINES}, got {self.engine!r}")
        if self.shots is not None and self.shots < 1:
            raise ConfigError(f"shots must be positive, got {self.shots}")
        parse_p_grid(self.p_grid)

    def with_overrides(self, **overrides) -> "RunConfig":
        """Apply the non-None entries of `overrides`."""
        return replace(self, **_coerce({key: v for key, v in overrides.items() if v is not None}))


_TYPES = {f.name: f.type for f in fields(RunConfig)}
_ALIASES = {"dict": "dict_path", "hash": "hash_algorithm"}


def _coerce(values: dict) -> dict:
    out = {}
    for key, value in values.items():
        key = _ALIASES.get(key, key)
        if key not in _TYPES:
            raise ConfigError(f"unknown config key {key!r}")
        kind = _TYPES[key]
        if isinstance(value, str) and kind in (int, int | None):
            try:
                value = int(value)
            except ValueError as e:
                raise ConfigError(f"{key} expects an integer, got {value!r}") from e
        out[key] = value
    return out


def read_config_file(path: str | PathLike) -> dict[str, str]:
    """Parse `key=value` lines; blank lines and `#` comments are skipped, dashes in keys become underscores."""
    values = {}
    with open(path, encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{line_no}: expected key=value, got {line!r}")
            key, value = (s.strip() for s in line.split("=", 1))
            values[key.replace("-", "_")] = value
    return values


def load_config(path: str | PathLike | None = None, **overrides) -> RunConfig:
    config = RunConfig()
    if path is not None:
        config = replace(config, **_coerce(read_config_file(path)))
    return config.with_overrides(**overrides)


def parse_p_grid(spec: str) -> list[float]:
    """'a:b:step' to the inclusive grid [a, a + step, ..., b], rounded to 12 decimals."""
    try:
        start, stop, step = (float(s) for s in spec.split(":"))
    except ValueError as e:
        raise ConfigError(f"p grid must look like a:b:step, got {spec!r}") from e
    if step <= 0 or stop < start or not (0 <= start and stop <= 1):
        raise ConfigError(f"p grid {spec!r} must satisfy 0 <= a <= b <= 1 and step > 0")
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + i * step, 12) for i in range(count)]
