"""Sweep configuration and deterministic table output.

Config files are flat ``key = value`` text documents (no nesting); command
line flags override file values, which override defaults.  Output tables are
CSV with ``#``-prefixed metadata lines or the JSON equivalent; floats are
emitted with 17 significant digits so reruns are byte-identical.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .dynamics import normalize_scheme

FORMATS = ("csv", "json")

THREADS_ENV_VAR = "SPINSENSE_THREADS"


class ConfigError(ValueError):
    """Invalid sweep configuration."""


def read_config_file(path: str) -> dict[str, str]:
    """Parse a flat key=value document; '#' starts a comment."""
    values: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw.rstrip()!r}")
            key, value = line.split("=", 1)
            key = key.strip().replace("-", "_")
            if not key:
                raise ConfigError(f"{path}:{lineno}: empty key")
            if key in values:
                raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
            values[key] = value.strip()
    return values


def _parse_int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(tok) for tok in text.split(",") if tok.strip())
    except ValueError:
        raise ConfigError(f"expected a comma-separated integer list, got {text!r}") from None


def _parse_grid(text: str) -> tuple[float, float, int, bool]:
    """'min,max,count' or 'min,max,count,log'."""
    toks = [tok.strip() for tok in text.split(",")]
    if len(toks) not in (3, 4):
        raise ConfigError(f"grid spec needs 'min,max,count[,log]', got {text!r}")
    log = False
    if len(toks) == 4:
        if toks[3] not in ("log", "lin"):
            raise ConfigError(f"grid scale must be 'log' or 'lin', got {toks[3]!r}")
        log = toks[3] == "log"
    try:
        lo, hi, count = float(toks[0]), float(toks[1]), int(toks[2])
    except ValueError:
        raise ConfigError(f"bad grid spec {text!r}") from None
    if count < 1 or hi <= lo:
        raise ConfigError(f"grid spec needs max > min and count >= 1, got {text!r}")
    return lo, hi, count, log


def _materialize_grid(spec: tuple[float, float, int, bool]) -> np.ndarray:
    lo, hi, count, log = spec
    if log:
        if lo <= 0:
            raise ConfigError("log grids need min > 0")
        return np.geomspace(lo, hi, count)
    return np.linspace(lo, hi, count)


@dataclass
class SweepConfig:
    """Resolved parameters of one ramsey/rabi sweep."""

    protocol: str
    scheme: str = "standard"
    n_atoms: Optional[int] = None
    n_list: Optional[tuple[int, ...]] = None
    gamma_d: float = 0.0
    gamma_a: float = 0.0
    tau: Optional[float] = None
    tau_grid: Optional[tuple[float, float, int, bool]] = None
    eta: Optional[float] = None
    omega_grid: Optional[tuple[float, float, int, bool]] = None
    seed: int = 0
    tol: float = 1e-9
    method: str = "auto"
    threads: int = 1
    out: Optional[str] = None
    format: str = "csv"

    def __post_init__(self):
        if self.protocol not in ("ramsey", "rabi"):
            raise ConfigError(f"protocol must be 'ramsey' or 'rabi', got {self.protocol!r}")
        self.scheme = normalize_scheme(self.scheme)
        if self.format not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}, got {self.format!r}")
        if self.n_atoms is None and self.n_list is None:
            raise ConfigError("need n_atoms or n_list")
        if self.n_atoms is not None and self.n_atoms < 1:
            raise ConfigError("n_atoms must be >= 1")
        if self.n_list is not None and len(self.n_list) == 0:
            raise ConfigError("n_list must be non-empty")
        if self.scheme != "standard":
            for n in (self.n_list or ()) + ((self.n_atoms,) if self.n_atoms else ()):
                if n % 2:
                    raise ConfigError(f"scheme {self.scheme!r} needs even atom numbers, got {n}")
        if self.gamma_d < 0 or self.gamma_a < 0:
            raise ConfigError("noise rates must be >= 0")
        if self.protocol == "ramsey" and self.tau is None and self.tau_grid is None:
            raise ConfigError("ramsey sweeps need tau or tau_grid")
        if self.protocol == "rabi":
            if self.eta is None or self.eta <= 0:
                raise ConfigError("rabi sweeps need a drive strength eta > 0")
        if self.tau is not None and self.tau <= 0:
            raise ConfigError("tau must be > 0")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")
        if self.tol <= 0:
            raise ConfigError("tol must be > 0")

    def omegas(self, default: np.ndarray) -> np.ndarray:
        grid = default if self.omega_grid is None else _materialize_grid(self.omega_grid)
        if grid.size < 5:
            raise ConfigError("detuning grids need at least 5 points")
        return grid

    def taus(self) -> Optional[np.ndarray]:
        if self.tau_grid is None:
            return None
        return _materialize_grid(self.tau_grid)

    def metadata(self) -> dict[str, object]:
        """Full resolved configuration, for output headers."""
        meta: dict[str, object] = {
            "protocol": self.protocol,
            "scheme": self.scheme,
            "gamma_d": self.gamma_d,
            "gamma_a": self.gamma_a,
            "seed": self.seed,
            "tol": self.tol,
            "method": self.method,
            "threads": self.threads,
            "format": self.format,
        }
        if self.n_atoms is not None:
            meta["n_atoms"] = self.n_atoms
        if self.n_list is not None:
            meta["n_list"] = ",".join(str(n) for n in self.n_list)
        if self.tau is not None:
            meta["tau"] = self.tau
        if self.tau_grid is not None:
            lo, hi, count, log = self.tau_grid
            meta["tau_grid"] = f"{lo:g},{hi:g},{count}{',log' if log else ''}"
        if self.eta is not None:
            meta["eta"] = self.eta
        if self.omega_grid is not None:
            lo, hi, count, log = self.omega_grid
            meta["omega_grid"] = f"{lo:g},{hi:g},{count}{',log' if log else ''}"
        return meta


def default_threads() -> int:
    raw = os.environ.get(THREADS_ENV_VAR, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def format_value(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17g}"
    return str(value)


def render_table(fmt: str, metadata: dict, columns: list[str], rows: list[tuple]) -> str:
    """Render one result table; CSV carries '#'-prefixed metadata lines."""
    if fmt == "csv":
        lines = [f"# {key} = {format_value(metadata[key])}" for key in sorted(metadata)]
        lines.append(",".join(columns))
        for row in rows:
            lines.append(",".join(format_value(v) for v in row))
        return "\n".join(lines) + "\n"
    if fmt == "json":
        payload = {
            "metadata": {k: metadata[k] for k in sorted(metadata)},
            "columns": columns,
            "rows": [
                [v if isinstance(v, str) else int(v) if isinstance(v, (int, np.integer)) else float(v) for v in row]
                for row in rows
            ],
        }
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"
    raise ConfigError(f"unknown format {fmt!r}")


def write_table(path: str, fmt: str, metadata: dict, columns: list[str], rows: list[tuple]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(render_table(fmt, metadata, columns, rows))
