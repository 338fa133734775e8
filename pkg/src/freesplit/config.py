"""Runtime configuration: budgets, horizons, tolerances.

Values come from defaults, then an optional ``key=value`` config file,
then environment variables with the ``FREESPLIT_`` prefix.  All knobs are
plain ints/floats; no randomness anywhere.
"""

from __future__ import annotations

import dataclasses
import os

from .errors import InvalidInput

ENV_PREFIX = "FREESPLIT_"


@dataclasses.dataclass(frozen=True)
class Config:
    # iteration of graph maps
    iterate_cap: int = 10**6  # max letters in an intermediate path
    # attracting-neighborhood data
    seg_len: int = 64  # defining segment length L
    horizon_fwd: int = 40  # h+
    horizon_bwd: int = 40  # h-
    stability: int = 3  # margin s
    lam_depth_cap: int = 8  # max depth for lamination approximations
    lam_len_target: int = 512  # grow segments at least this long if allowed
    # candidate classes for the W projection
    cand_len: int = 4  # max cyclic length of candidate classes
    cand_cap: int = 24  # max number of candidates per factor system
    # Whitehead machinery
    whitehead_max_moves: int = 10**5
    whitehead_max_letters: int = 10**4
    # Perron-Frobenius estimation
    pf_tol: float = 1e-9
    pf_iter_cap: int = 10**5
    eg_threshold: float = 1.0 + 1e-9
    # conjugacy/outer-equality search
    outer_budget: int = 4000
    # blow-up searches in the splitting complex
    blowup_word_cap: int = 32
    bfs_depth_cap: int = 6
    # classifier
    power_cap: int = 12
    fills_depth_cap: int = 6

    def with_overrides(self, **kw) -> "Config":
        return dataclasses.replace(self, **kw)


def _coerce(name: str, raw: str):
    field = {f.name: f for f in dataclasses.fields(Config)}.get(name)
    if field is None:
        raise InvalidInput(f"unknown config key {name!r}")
    kind = type(field.default)
    try:
        return kind(raw)
    except ValueError as exc:
        raise InvalidInput(f"bad value for {name}: {raw!r}") from exc


def load_config(path: str | None = None, env: dict | None = None) -> Config:
    """Defaults, overridden by a config file, overridden by environment."""
    values = {}
    if path:
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                if "=" not in line:
                    raise InvalidInput(f"bad config line: {line!r}")
                key, _, raw = line.partition("=")
                values[key.strip()] = _coerce(key.strip(), raw.strip())
    env = os.environ if env is None else env
    for field in dataclasses.fields(Config):
        raw = env.get(ENV_PREFIX + field.name.upper())
        if raw is not None:
            values[field.name] = _coerce(field.name, raw)
    return Config(**values)


DEFAULT = Config()
