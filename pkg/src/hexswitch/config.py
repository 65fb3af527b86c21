"""CLI configuration file support.

The config file is TOML, found through the ``HEXSWITCH_CONFIG``
environment variable or an explicit ``--config`` path.  It supplies
defaults only; command-line flags always win.

Recognized keys::

    [solver]
    backend = "search"        # or "milp"
    budget_ms = 5000.0

    [rotor]
    policy = "spread"         # or "corners"

    [latency]
    mode = "serial"           # or "linear"
    per_puc_ms = 47.189
    std_ms = 3.96
    k = 0.005                 # seconds per gate, linear mode
    intercept_ms = 0.0

    [bitrate]
    table = [[9, 9.41, 0.0], [13, 9.41, 0.0]]

    [client]
    server = "http://127.0.0.1:8000"
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Any

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

ENV_CONFIG = "HEXSWITCH_CONFIG"


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class AppConfig:
    backend: str | None = None
    budget_ms: float | None = None
    policy: str | None = None
    latency: dict[str, Any] = field(default_factory=dict)
    bitrate_table: list[list[float]] | None = None
    server: str | None = None

    def latency_params(self) -> dict[str, Any] | None:
        """Latency section translated to the service's parameter names."""
        if not self.latency:
            return None
        out: dict[str, Any] = {}
        renames = {
            "mode": "mode",
            "per_puc_ms": "per_puc_mean_ms",
            "std_ms": "per_puc_std_ms",
            "k": "linear_slope_k",
            "intercept_ms": "linear_intercept_ms",
        }
        for key, value in self.latency.items():
            out[renames[key]] = value
        return out


def _section(data: dict[str, Any], name: str) -> dict[str, Any]:
    raw = data.get(name, {})
    if not isinstance(raw, dict):
        raise ConfigError(f"config section [{name}] must be a table")
    return raw


def _number(section: str, key: str, value: Any) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"config {section}.{key} must be a number, got {value!r}")
    return float(value)


def _string(section: str, key: str, value: Any) -> str:
    if not isinstance(value, str):
        raise ConfigError(f"config {section}.{key} must be a string, got {value!r}")
    return value


def load_config(path: str | None = None) -> AppConfig:
    """Read the config file named by ``path`` or $HEXSWITCH_CONFIG.

    No file configured means all defaults; a configured file that cannot
    be read or parsed is an error.
    """
    if path is None:
        path = os.environ.get(ENV_CONFIG)
    if not path:
        return AppConfig()
    try:
        with open(path, "rb") as handle:
            data = tomllib.load(handle)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid TOML: {exc}") from exc

    solver = _section(data, "solver")
    rotor = _section(data, "rotor")
    latency = _section(data, "latency")
    bitrate = _section(data, "bitrate")
    client = _section(data, "client")

    backend = None
    if "backend" in solver:
        backend = _string("solver", "backend", solver["backend"])
    budget_ms = None
    if "budget_ms" in solver:
        budget_ms = _number("solver", "budget_ms", solver["budget_ms"])
        if budget_ms <= 0:
            raise ConfigError("config solver.budget_ms must be positive")

    policy = None
    if "policy" in rotor:
        policy = _string("rotor", "policy", rotor["policy"])

    latency_out: dict[str, Any] = {}
    for key in latency:
        if key == "mode":
            latency_out[key] = _string("latency", key, latency[key])
        elif key in ("per_puc_ms", "std_ms", "k", "intercept_ms"):
            latency_out[key] = _number("latency", key, latency[key])
        else:
            raise ConfigError(f"config latency.{key} is not a recognized key")

    table = None
    if "table" in bitrate:
        raw_table = bitrate["table"]
        if not isinstance(raw_table, list) or not raw_table:
            raise ConfigError("config bitrate.table must be a non-empty list of rows")
        table = []
        for i, row in enumerate(raw_table):
            if not isinstance(row, list) or len(row) != 3:
                raise ConfigError(
                    f"config bitrate.table[{i}] must be [route_length, bitrate_gbps, loss_pct]"
                )
            table.append([_number("bitrate", f"table[{i}][{j}]", v) for j, v in enumerate(row)])

    server = None
    if "server" in client:
        server = _string("client", "server", client["server"])

    return AppConfig(
        backend=backend,
        budget_ms=budget_ms,
        policy=policy,
        latency=latency_out,
        bitrate_table=table,
        server=server,
    )
