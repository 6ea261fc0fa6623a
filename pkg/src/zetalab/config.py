"""Run configuration and its flat key-value file format.

The file mirrors RunConfig field names exactly, one ``key = value`` per line;
'#' starts a comment; unknown keys are errors.  Values round-trip losslessly
(floats are written with repr).
"""

import dataclasses
import math
from dataclasses import dataclass

from zetalab.chain import DEFAULT_X_SQUARED_CAP, ClampPolicy
from zetalab.errors import ConfigError


@dataclass
class RunConfig:
    T: float = 1e6
    samples: int = 2000
    seed: int = 20260810
    threads: int = 1
    normalization: str = "variance"          # 'paper' (s_norm) or 'variance'
    theta_x: float | None = 0.25
    theta_1: float | None = 0.10
    theta_2: float | None = 0.18
    x_squared_cap: int = DEFAULT_X_SQUARED_CAP
    sigma0: float | None = None              # None -> 1/2 + 1/log T
    em_terms: int = 0                        # 0 -> automatic per height
    bernoulli_order: int = 12
    error_budget: float = 1e-3
    gaussian_n: int = 10000
    cf_xi_max: float = 3.0
    cf_points: int = 121
    r1: float | None = None                  # None -> sqrt(log log T)
    r2: float | None = None                  # None -> sqrt(log log log T)
    fourier_c: float = 1.0                   # F = fourier_c * sqrt(log log T)
    moment_x: float = 100.0
    moment_k_max: int = 3
    moment_nodes: int = 200001
    identity_t_lo: float = 100.0
    identity_t_hi: float = 500.0
    identity_points: int = 100
    identity_x: float = 50.0
    identity_sigma: float = 0.6
    identity_zero_window: float = 50.0
    zero_resolution: float = 0.05
    t_values: tuple = ()
    out: str = ""
    plot: bool = False

    def __post_init__(self):
        if self.samples < 1:
            raise ConfigError("samples must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")
        if self.normalization not in ("paper", "variance"):
            raise ConfigError(f"normalization must be 'paper' or 'variance', "
                              f"got {self.normalization!r}")
        thetas = (self.theta_x, self.theta_1, self.theta_2)
        if any(v is not None for v in thetas) and any(v is None for v in thetas):
            raise ConfigError("set all of theta_x/theta_1/theta_2 or none of them")

    def clamp_policy(self):
        exps = None
        if self.theta_x is not None:
            exps = (self.theta_x, self.theta_1, self.theta_2)
        return ClampPolicy(x_squared_cap=self.x_squared_cap, exponents=exps)

    def r1_value(self):
        return self.r1 if self.r1 is not None else math.sqrt(math.log(math.log(self.T)))

    def r2_value(self):
        if self.r2 is not None:
            return self.r2
        return math.sqrt(math.log(math.log(math.log(self.T))))

    def fourier_f(self):
        return self.fourier_c * math.sqrt(math.log(math.log(self.T)))


_FIELDS = {f.name: f for f in dataclasses.fields(RunConfig)}
_OPTIONAL_FLOATS = {"theta_x", "theta_1", "theta_2", "sigma0", "r1", "r2"}
_FLOATS = {"T", "error_budget", "cf_xi_max", "fourier_c", "moment_x",
           "identity_t_lo", "identity_t_hi", "identity_x", "identity_sigma",
           "identity_zero_window", "zero_resolution"}
_INTS = {"samples", "seed", "threads", "x_squared_cap", "em_terms",
         "bernoulli_order", "gaussian_n", "cf_points", "moment_k_max",
         "moment_nodes", "identity_points"}
_BOOLS = {"plot"}
_STRINGS = {"normalization", "out"}


def _format_value(name, value):
    if name == "t_values":
        return ",".join(repr(v) for v in value)
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _parse_value(name, text):
    text = text.strip()
    if name == "t_values":
        return tuple(float(v) for v in text.split(",") if v.strip()) if text else ()
    if name in _OPTIONAL_FLOATS:
        return None if text == "" else float(text)
    if text == "" and name not in _STRINGS:
        raise ConfigError(f"config key {name!r} needs a value")
    if name in _BOOLS:
        if text.lower() in ("true", "1", "yes"):
            return True
        if text.lower() in ("false", "0", "no"):
            return False
        raise ConfigError(f"config key {name!r}: bad boolean {text!r}")
    if name in _INTS:
        try:
            return int(text)
        except ValueError:
            return int(float(text))   # allow '1e6'-style counts (not exact-seed safe)
    if name in _FLOATS:
        return float(text)
    return text


def save_config(config, path):
    """Write the flat key = value file (all fields, lossless round-trip)."""
    with open(path, "w") as fh:
        for f in dataclasses.fields(RunConfig):
            fh.write(f"{f.name} = {_format_value(f.name, getattr(config, f.name))}\n")


def parse_config_text(text):
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"config line {lineno}: expected 'key = value', got {raw!r}")
        key, _, val = line.partition("=")
        key = key.strip()
        if key not in _FIELDS:
            raise ConfigError(f"config line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"config line {lineno}: duplicate key {key!r}")
        values[key] = _parse_value(key, val)
    return RunConfig(**values)


def load_config(path):
    with open(path) as fh:
        return parse_config_text(fh.read())
