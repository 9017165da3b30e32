"""Run configuration: plain key=value files, flag overrides, stable hashing."""

import hashlib
from dataclasses import dataclass, fields

from .errors import ConfigError


@dataclass
class RunConfig:
    data: str | None = None
    labels: str | None = None
    outliers: str | None = None
    k: int = 2
    starts: int = 10_000
    seed: int = 0
    sigma: float = 30.0
    alpha: float = 0.02
    temp: float = 1.0
    budget: int = 1000
    out: str = "out"
    threads: int = 1

    def validate(self):
        if self.k < 1:
            raise ConfigError("k must be at least 1")
        if self.starts < 1:
            raise ConfigError("starts must be at least 1")
        if self.seed < 0:
            raise ConfigError("seed must be non-negative")
        if self.sigma <= 0 or self.alpha <= 0:
            raise ConfigError("sigma and alpha must be positive")
        if self.temp <= 0:
            raise ConfigError("temp must be positive")
        if self.budget < 0:
            raise ConfigError("budget must be non-negative")
        if self.threads < 1:
            raise ConfigError("threads must be at least 1")
        return self

    def hash(self) -> str:
        """Digest of the semantic inputs; paths, output dir and worker
        count do not affect artifacts and are excluded."""
        payload = "|".join(
            f"{name}={getattr(self, name)!r}"
            for name in ("k", "starts", "seed", "sigma", "alpha", "temp", "budget")
        )
        return hashlib.sha256(payload.encode()).hexdigest()[:16]


_INT_FIELDS = {"k", "starts", "seed", "budget", "threads"}
_FLOAT_FIELDS = {"sigma", "alpha", "temp"}


def load_config_file(path) -> dict:
    """Parse key = value lines; '#' starts a comment."""
    values = {}
    known = {f.name for f in fields(RunConfig)}
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key = value")
            key, _, value = line.partition("=")
            key = key.strip()
            value = value.strip()
            if key not in known:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            try:
                if key in _INT_FIELDS:
                    values[key] = int(value)
                elif key in _FLOAT_FIELDS:
                    values[key] = float(value)
                else:
                    values[key] = value
            except ValueError:
                raise ConfigError(f"{path}:{lineno}: bad value for {key!r}") from None
    return values


def resolve_config(file_path=None, overrides=None) -> RunConfig:
    """Config file values first, command-line overrides on top."""
    values = load_config_file(file_path) if file_path else {}
    for key, val in (overrides or {}).items():
        if val is not None:
            values[key] = val
    return RunConfig(**values).validate()
