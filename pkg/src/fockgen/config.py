"""Run configuration: YAML ingestion, schema validation, canonical hashing.

All frequencies in a config file are ordinary frequencies in GHz (converted
to rad/ns internally, see `hamiltonians`); rates likewise in GHz.  Unknown
keys anywhere in the file are rejected.  `--set a.b=c` overrides nest into
the same schema and are validated identically.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np
import yaml

from .dynamics import LindbladRates
from .errors import DomainError
from .fockspace import FockConfig
from .hamiltonians import SystemParams
from .synthesis import TargetState

__all__ = ["RunConfig", "load_config", "ConfigError"]


class ConfigError(DomainError):
    """A config file or override violates the documented schema."""


_DEFAULTS = {
    "system": {
        "omega_z_ghz": 19.5,
        "omega_x_ghz": 1.6,
        "omega_cav_ghz": 2.0,
        "eta": 1.11,
        "g_ghz": None,
    },
    "drive": {
        "x_d": 1.305,
        "bessel_order": -1,
    },
    "target": {
        "coeffs": [[1.0, 0.0], [0.0, 0.0], [1.0, 0.0]],
        "qubit_branch": "g",
    },
    "truncation": {
        "dim": 40,
        "leak_tol": 1e-8,
    },
    "rates": {
        "gamma_10_ghz": 0.0,
        "gamma_11_ghz": 0.0,
        "gamma_00_ghz": 0.0,
        "kappa_ghz": 0.0,
    },
    "integration": {
        "tol": 1e-9,
        "lindblad_tol": 1e-8,
        "initial_state": "coherent",
    },
    "scan": {
        "eta_values": [0.33, 0.59, 0.85, 1.11, 1.37],
        "x_d_values": [0.265, 0.525, 0.785, 1.045, 1.305],
    },
    "ground_scan": {
        "eta_max": 3.5,
        "eta_points": 20,
        "ratio_max": 0.2,
        "ratio_points": 20,
        "dim": 60,
    },
    "wigner": {
        "x_min": -3.0,
        "x_max": 3.0,
        "y_min": -3.0,
        "y_max": 3.0,
        "nx": 201,
        "ny": 201,
    },
    "output": {
        "dir": "out",
    },
    "seed": 0,  # reserved; all computations are deterministic
}

UNITS_NOTE = "frequencies-configured-in-GHz-times-2pi-to-rad-per-ns"


def _merge(base: dict, override: dict, path: str = "") -> dict:
    out = dict(base)
    for key, val in override.items():
        here = f"{path}.{key}" if path else key
        if key not in base:
            raise ConfigError(f"unknown config key: {here!r}")
        if isinstance(base[key], dict):
            if not isinstance(val, dict):
                raise ConfigError(f"{here!r} must be a mapping")
            out[key] = _merge(base[key], val, here)
        else:
            out[key] = val
    return out


def _set_path(tree: dict, dotted: str, raw_value: str):
    value = yaml.safe_load(raw_value)
    keys = dotted.split(".")
    node = tree
    for key in keys[:-1]:
        node = node.setdefault(key, {})
        if not isinstance(node, dict):
            raise ConfigError(f"cannot override through scalar at {key!r}")
    node[keys[-1]] = value


@dataclass(frozen=True)
class RunConfig:
    """Validated run configuration plus its canonical hash."""

    raw: dict = field(repr=False)
    sha256: str = ""

    # -- constructors ------------------------------------------------------
    @classmethod
    def from_tree(cls, tree: dict) -> "RunConfig":
        merged = _merge(_DEFAULTS, tree or {})
        _validate(merged)
        canon = json.dumps(merged, sort_keys=True, separators=(",", ":"))
        return cls(raw=merged, sha256=hashlib.sha256(canon.encode()).hexdigest())

    # -- typed views -------------------------------------------------------
    def system(self, eta_override: float | None = None) -> SystemParams:
        s = self.raw["system"]
        eta = s["eta"] if eta_override is None else eta_override
        if s["g_ghz"] is not None and eta_override is None:
            g_ghz = s["g_ghz"]
        else:
            g_ghz = eta * s["omega_cav_ghz"] / 2.0
        return SystemParams.from_ghz(s["omega_z_ghz"], s["omega_x_ghz"], s["omega_cav_ghz"], g_ghz)

    def fock(self, dim_override: int | None = None) -> FockConfig:
        t = self.raw["truncation"]
        return FockConfig(dim_override or t["dim"], t["leak_tol"])

    def target(self) -> TargetState:
        t = self.raw["target"]
        coeffs = [complex(re, im) for re, im in t["coeffs"]]
        return TargetState.normalized(coeffs, t["qubit_branch"])

    def rates(self) -> LindbladRates:
        r = self.raw["rates"]
        return LindbladRates.from_ghz(
            gamma_10=r["gamma_10_ghz"],
            gamma_11=r["gamma_11_ghz"],
            kappa=r["kappa_ghz"],
            gamma_00=r["gamma_00_ghz"],
        )

    @property
    def x_d(self) -> float:
        return self.raw["drive"]["x_d"]

    @property
    def bessel_order(self) -> int:
        return self.raw["drive"]["bessel_order"]

    def meta_cells(self) -> list[str]:
        """Cells of the metadata header row every CSV starts with."""
        return ["meta", f"config={self.sha256}", f"units={UNITS_NOTE}"]


def _require(cond: bool, msg: str):
    if not cond:
        raise ConfigError(msg)


def _validate(tree: dict):
    s = tree["system"]
    for key in ("omega_z_ghz", "omega_x_ghz", "omega_cav_ghz"):
        _require(isinstance(s[key], (int, float)) and s[key] > 0, f"system.{key} must be > 0")
    _require(
        s["eta"] is None or (isinstance(s["eta"], (int, float)) and s["eta"] > 0),
        "system.eta must be > 0",
    )
    _require(
        s["g_ghz"] is None or (isinstance(s["g_ghz"], (int, float)) and s["g_ghz"] > 0),
        "system.g_ghz must be > 0",
    )
    _require(s["eta"] is not None or s["g_ghz"] is not None, "set system.eta or system.g_ghz")

    d = tree["drive"]
    _require(isinstance(d["x_d"], (int, float)) and d["x_d"] >= 0, "drive.x_d must be >= 0")
    _require(
        isinstance(d["bessel_order"], int) and d["bessel_order"] != 0,
        "drive.bessel_order must be a nonzero integer",
    )

    t = tree["target"]
    _require(
        isinstance(t["coeffs"], list) and len(t["coeffs"]) >= 1, "target.coeffs must be nonempty"
    )
    for item in t["coeffs"]:
        _require(
            isinstance(item, list) and len(item) == 2
            and all(isinstance(v, (int, float)) for v in item),
            "target.coeffs entries must be [re, im] pairs",
        )
    _require(
        float(np.linalg.norm(np.asarray(t["coeffs"], dtype=float))) > 0,
        "target.coeffs must not all be zero",
    )
    _require(t["qubit_branch"] in ("g", "e"), "target.qubit_branch must be 'g' or 'e'")

    tr = tree["truncation"]
    _require(isinstance(tr["dim"], int) and tr["dim"] >= 4, "truncation.dim must be an int >= 4")
    _require(0 <= tr["leak_tol"] < 1, "truncation.leak_tol must lie in [0, 1)")

    r = tree["rates"]
    for key in r:
        _require(isinstance(r[key], (int, float)) and r[key] >= 0, f"rates.{key} must be >= 0")

    it = tree["integration"]
    _require(0 < it["tol"] <= 1e-3, "integration.tol must lie in (0, 1e-3]")
    _require(0 < it["lindblad_tol"] <= 1e-3, "integration.lindblad_tol must lie in (0, 1e-3]")
    _require(
        it["initial_state"] in ("coherent", "ground"),
        "integration.initial_state must be 'coherent' or 'ground'",
    )

    sc = tree["scan"]
    for key in ("eta_values", "x_d_values"):
        _require(
            isinstance(sc[key], list) and len(sc[key]) >= 1
            and all(isinstance(v, (int, float)) and v > 0 for v in sc[key]),
            f"scan.{key} must be a nonempty list of positive numbers",
        )

    g = tree["ground_scan"]
    _require(g["eta_max"] > 0 and g["ratio_max"] > 0, "ground_scan ranges must be > 0")
    _require(
        isinstance(g["eta_points"], int) and g["eta_points"] >= 1
        and isinstance(g["ratio_points"], int) and g["ratio_points"] >= 1,
        "ground_scan point counts must be ints >= 1",
    )
    _require(isinstance(g["dim"], int) and g["dim"] >= 4, "ground_scan.dim must be an int >= 4")

    w = tree["wigner"]
    _require(w["x_min"] < w["x_max"] and w["y_min"] < w["y_max"], "wigner ranges must be ordered")
    _require(
        isinstance(w["nx"], int) and w["nx"] >= 2 and isinstance(w["ny"], int) and w["ny"] >= 2,
        "wigner.nx/ny must be ints >= 2",
    )

    _require(isinstance(tree["output"]["dir"], str), "output.dir must be a string")
    _require(isinstance(tree["seed"], int), "seed must be an integer")


def load_config(path: str | None, overrides: list[str] = ()) -> RunConfig:
    """Load a YAML config (or defaults when path is None) plus --set overrides."""
    tree: dict = {}
    if path is not None:
        with open(path) as fh:
            loaded = yaml.safe_load(fh)
        if loaded is None:
            loaded = {}
        if not isinstance(loaded, dict):
            raise ConfigError("config root must be a mapping")
        tree = loaded
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        dotted, raw = item.split("=", 1)
        _set_path(tree, dotted.strip(), raw)
    return RunConfig.from_tree(tree)
