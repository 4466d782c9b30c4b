import math
from pathlib import Path

from decouple import Csv, RepositoryEnv, strtobool

from .exceptions import ConfigError

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15


class SplitMix64:
    """SplitMix64 generator.

    State transition: state <- state + 0x9E3779B97F4A7C15 (mod 2^64).
    Output: z = state; z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB; z ^ (z >> 31), all mod 2^64.
    A double in [0, 1) is (z >> 11) * 2^-53.
    """

    def __init__(self, seed):
        self.state = int(seed) & MASK64

    def next_u64(self):
        self.state = (self.state + GOLDEN_GAMMA) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def random(self):
        return (self.next_u64() >> 11) * 2.0 ** -53

    def uniform(self, low, high):
        return low + (high - low) * self.random()


def derive_seed(seed, index):
    """Seed of work item `index`: first SplitMix64 output from state seed + index * gamma."""
    return SplitMix64((int(seed) + index * GOLDEN_GAMMA) & MASK64).next_u64()


def format_float(value):
    # 17 significant digits round-trip every double
    if value is None:
        return ""
    return f"{float(value):.17g}"


def json_safe(value):
    """Replace non-finite floats by None so the JSON stays standard."""
    if isinstance(value, dict):
        return {k: json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [json_safe(v) for v in value]
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if hasattr(value, "item") and not isinstance(value, (str, bytes)):
        return json_safe(value.item())
    return value


def _cast_bool(raw):
    return bool(strtobool(raw))


def _cast_int_list(raw):
    return [int(v) for v in Csv()(raw)]


def _cast_float_list(raw):
    return [float(v) for v in Csv()(raw)]


CASTS = {
    int: int,
    float: float,
    str: str,
    bool: _cast_bool,
    "int_list": _cast_int_list,
    "float_list": _cast_float_list,
}


def cast_value(key, raw, kind):
    if not isinstance(raw, str):
        return raw
    try:
        return CASTS[kind](raw.strip())
    except (ValueError, KeyError) as e:
        raise ConfigError(f"invalid value for {key!r}: {raw!r} ({e})")


def load_config_file(path):
    """Read a flat `key = value` file; later keys override earlier ones."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    repository = RepositoryEnv(str(path))
    return dict(repository.data)


def resolve_config(schema, defaults, config_path=None, overrides=None):
    """Merge defaults, the optional config file and command-line overrides.

    `schema` maps every accepted key to its cast kind; anything else is rejected.
    """
    resolved = dict(defaults)
    if config_path:
        for key, raw in load_config_file(config_path).items():
            if key not in schema:
                raise ConfigError(f"unknown config key {key!r} in {config_path}")
            resolved[key] = cast_value(key, raw, schema[key])
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key not in schema:
            raise ConfigError(f"unknown option {key!r}")
        resolved[key] = cast_value(key, value, schema[key])
    return resolved
