"""Experiment configuration: sectioned key-value files with strict schemas.

Unknown sections or keys are hard errors (a silent typo in an exponent name
would invalidate every verdict downstream), and the decay-rate parameter
windows are validated at load time so misconfigured runs fail before any
computation starts.
"""

from __future__ import annotations

import configparser
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .decay import validate_sigma, validate_sigma1
from .model import MaterialParams


class ConfigError(ValueError):
    """The configuration file violates the schema or a parameter window."""


def _float_list(text: str) -> list[float]:
    return [float(tok) for tok in text.replace(",", " ").split()]


# section -> key -> (parser, default)
_SCHEMA: dict[str, dict[str, tuple]] = {
    "run": {
        "dimension": (int, 2),
        "seed": (int, 0),
        "label": (str, ""),
    },
    "grid": {
        "points": (int, 256),
        "length": (float, 16.0 * math.pi),
    },
    "material": {
        "mu_star": (float, 0.25),
        "gamma_p": (float, 2.0),
        "direction": (_float_list, None),
        "viscosity_law": (str, "constant"),
        "mu_slope": (float, 0.0),
        "lambda_slope": (float, 0.0),
    },
    "rates": {
        "p": (float, 2.0),
        "sigma1": (float, 1.0),
        "sigma": (_float_list, [0.0]),
        "lebesgue_l": (_float_list, []),
        "lebesgue_r": (float, 2.0),
    },
    "analysis": {
        "k0": (int, 0),
        "gamma": (float, 0.125),
    },
    "scheme": {
        "method": (str, "exponential"),
        "dt": (float, 0.05),
        "t_end": (float, 50.0),
        "dealias": (float, 2.0 / 3.0),
        "snapshot_every": (int, 100),
        "cfl_limit": (float, 0.5),
    },
    "initial": {
        "profile": (str, "low-band"),
        "amplitude": (float, 1e-3),
    },
    "oracle": {
        "j_lo": (int, -16),
        "j_hi": (int, 1),
        "n_radial": (int, 32),
        "n_angular": (int, 64),
        "n_polar": (int, 32),
        "n_azimuth": (int, 64),
        "polarization": (str, "acoustic-magnetic"),
    },
    "fit": {
        "t_start": (float, 1e2),
        "t_end": (float, 1e4),
        "samples": (int, 25),
        "tolerance": (float, 0.05),
    },
    "harness": {
        "samples": (int, 200),
        "points": (int, 64),
        "length": (float, 4.0 * math.pi),
    },
    "spectrum": {
        "samples": (int, 10000),
        "r_min": (float, 1e-3),
        "r_max": (float, 1e3),
    },
}

_INITIAL_PROFILES = ("low-band", "flat-band", "single-octave", "zero")


@dataclass
class RunConfig:
    """Fully resolved experiment configuration."""

    values: dict[str, dict[str, object]] = field(default_factory=dict)

    def __getitem__(self, section: str) -> dict:
        return self.values[section]

    @property
    def seed(self) -> int:
        return int(self.values["run"]["seed"])

    def material_params(self) -> MaterialParams:
        m = self.values["material"]
        dim = int(self.values["run"]["dimension"])
        direction = m["direction"]
        if direction is None:
            direction = [0.0] * dim
            direction[-1] = 1.0
        return MaterialParams(
            dim=dim,
            mu_star=float(m["mu_star"]),
            gamma_p=float(m["gamma_p"]),
            direction=tuple(float(x) for x in direction),
            viscosity_law=str(m["viscosity_law"]),
            mu_slope=float(m["mu_slope"]),
            lambda_slope=float(m["lambda_slope"]),
        )

    def resolved_text(self) -> str:
        """Canonical rendering used for the run id and config.resolved."""
        out = io.StringIO()
        for section in sorted(self.values):
            out.write(f"[{section}]\n")
            for key in sorted(self.values[section]):
                v = self.values[section][key]
                if v is None:
                    continue  # unset optional, the default re-applies on load
                if isinstance(v, list):
                    text = ", ".join(f"{float(x):.17g}" for x in v)
                elif isinstance(v, float):
                    text = f"{v:.17g}"
                else:
                    text = str(v)
                out.write(f"{key} = {text}\n")
            out.write("\n")
        return out.getvalue()


def _validate(cfg: RunConfig):
    dim = int(cfg["run"]["dimension"])
    if dim not in (2, 3):
        raise ConfigError("run.dimension must be 2 or 3")
    pts = int(cfg["grid"]["points"])
    if pts < 4 or pts & (pts - 1):
        raise ConfigError("grid.points must be a power of two (at least 4)")
    if cfg["grid"]["length"] <= 0:
        raise ConfigError("grid.length must be positive")

    rates = cfg["rates"]
    p, sigma1 = float(rates["p"]), float(rates["sigma1"])
    try:
        validate_sigma1(dim, p, sigma1)
        for s in rates["sigma"]:
            validate_sigma(dim, p, sigma1, float(s))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    try:
        cfg.material_params()
    except ValueError as exc:
        raise ConfigError(f"material: {exc}") from exc

    if cfg["initial"]["profile"] not in _INITIAL_PROFILES:
        raise ConfigError(
            f"initial.profile must be one of {_INITIAL_PROFILES}, "
            f"got {cfg['initial']['profile']!r}"
        )
    if cfg["scheme"]["method"] not in ("exponential", "imex"):
        raise ConfigError("scheme.method must be 'exponential' or 'imex'")
    if not 0.0 < cfg["scheme"]["dealias"] <= 1.0:
        raise ConfigError("scheme.dealias must lie in (0, 1]")
    if cfg["oracle"]["polarization"] not in (
        "acoustic-magnetic",
        "acoustic",
        "magnetic",
    ):
        raise ConfigError("oracle.polarization is not a known polarization")
    if cfg["fit"]["t_end"] <= cfg["fit"]["t_start"]:
        raise ConfigError("fit.t_end must exceed fit.t_start")


def default_config() -> RunConfig:
    cfg = RunConfig(
        values={
            sec: {k: default for k, (_, default) in keys.items()}
            for sec, keys in _SCHEMA.items()
        }
    )
    _validate(cfg)
    return cfg


def load_config(path=None, text: str | None = None, overrides: dict | None = None) -> RunConfig:
    """Parse, apply defaults, reject unknown keys, and validate windows."""
    cfg = default_config()
    if path is not None or text is not None:
        parser = configparser.ConfigParser(interpolation=None)
        parser.optionxform = str
        try:
            if text is not None:
                parser.read_string(text)
            else:
                with open(path, encoding="utf-8") as fh:
                    parser.read_string(fh.read())
        except configparser.Error as exc:
            raise ConfigError(f"malformed config: {exc}") from exc
        for section in parser.sections():
            if section not in _SCHEMA:
                raise ConfigError(f"unknown config section [{section}]")
            for key, raw in parser.items(section):
                if key not in _SCHEMA[section]:
                    raise ConfigError(f"unknown key {key!r} in section [{section}]")
                caster = _SCHEMA[section][key][0]
                try:
                    cfg.values[section][key] = caster(raw)
                except ValueError as exc:
                    raise ConfigError(
                        f"cannot parse [{section}] {key} = {raw!r}: {exc}"
                    ) from exc
    if overrides:
        for (section, key), value in overrides.items():
            if section not in _SCHEMA or key not in _SCHEMA[section]:
                raise ConfigError(f"unknown override [{section}] {key}")
            cfg.values[section][key] = value
    _validate(cfg)
    return cfg


def initial_state(cfg: RunConfig):
    """Build the seeded initial data named by the config."""
    from .ensembles import default_bins, random_state_fields, zero_state_fields
    from .grid import TorusGrid
    from .model import State

    grid = TorusGrid(
        int(cfg["run"]["dimension"]),
        int(cfg["grid"]["points"]),
        float(cfg["grid"]["length"]),
    )
    profile = cfg["initial"]["profile"]
    if profile == "zero":
        return State(*zero_state_fields(grid))
    rng = np.random.default_rng([cfg.seed, 0x1D5EED])
    bins = default_bins(grid)
    shape = {"low-band": "geometric", "flat-band": "flat", "single-octave": "single"}[profile]
    a, u, h = random_state_fields(
        grid, bins, float(cfg["initial"]["amplitude"]), rng, profile=shape
    )
    return State(a, u, h)
