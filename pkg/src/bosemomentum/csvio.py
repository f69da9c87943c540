"""CSV files with a '#'-prefixed run manifest, and tabulated distributions read back from them."""

from __future__ import annotations

import datetime as _dt
import math
import shlex
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.interpolate import RegularGridInterpolator

_LOG_FLOOR = -745.0  # log of the smallest subnormal double


@dataclass(frozen=True)
class RunManifest:
    command: str
    parameters: dict
    version: str
    argv: list[str]
    timestamp: str = ""

    @classmethod
    def create(cls, command: str, parameters: dict, argv: list[str]) -> "RunManifest":
        from bosemomentum import __version__

        stamp = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
        return cls(command, dict(parameters), __version__, list(argv), stamp)

    def lines(self) -> list[str]:
        out = [
            f"# bosemomentum {self.version}",
            f"# command: {self.command}",
            f"# rerun: bosemomentum {shlex.join(self.argv)}",
        ]
        out += [f"# {key} = {_fmt_param(value)}" for key, value in self.parameters.items()]
        out.append(f"# timestamp: {self.timestamp}")
        return out


def _fmt_param(value) -> str:
    if isinstance(value, (list, tuple)):
        return ",".join(_fmt_param(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(getattr(value, "value", value))


def fmt(value) -> str:
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    if isinstance(value, str):
        return value
    return repr(float(value))


def write_csv(path, manifest: RunManifest, columns: list[str], rows, nullable=()) -> None:
    """Write manifest comment block, header and rows; LF line endings, full-precision floats.

    Non-finite values are refused except in ``nullable`` columns (flagged failures).
    """
    lines = manifest.lines() + [",".join(columns)]
    for row in rows:
        values = [fmt(v) for v in row]
        for name, text in zip(columns, values):
            if text in ("nan", "inf", "-inf") and name not in nullable:
                raise ValueError(f"non-finite value in column {name!r}")
        lines.append(",".join(values))
    text = "\n".join(lines) + "\n"
    if path is None or str(path) == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, newline="\n")


def read_csv(path) -> tuple[list[str], dict[str, np.ndarray]]:
    """Return (comment lines, columns) from a manifest CSV."""
    comments, header, rows = [], None, []
    for line in Path(path).read_text().splitlines():
        if not line.strip():
            continue
        if line.startswith("#"):
            comments.append(line)
        elif header is None:
            header = [h.strip() for h in line.split(",")]
        else:
            rows.append([float(x) for x in line.split(",")])
    if header is None:
        raise ValueError(f"{path}: no header row")
    data = np.array(rows, dtype=float).reshape(-1, len(header))
    return comments, {name: data[:, i] for i, name in enumerate(header)}


class TabulatedDistribution:
    """Cylindrically symmetric distribution sampled on a rectangular (p_rho, |p_z|) grid.

    Interpolates log n cubically in (p_rho^2, p_z^2), where each Gaussian
    component is linear; zero outside the sampled range.
    """

    def __init__(self, p_rho, p_z, n):
        p_rho = np.asarray(p_rho, dtype=float)
        p_z = np.abs(np.asarray(p_z, dtype=float))
        n = np.asarray(n, dtype=float)
        if np.any(n < 0) or not np.all(np.isfinite(n)):
            raise ValueError("tabulated distribution must be finite and non-negative")
        rho_axis, z_axis = np.unique(p_rho), np.unique(p_z)
        if len(rho_axis) < 4 or len(z_axis) < 4:
            raise ValueError("need at least 4 distinct p_rho and |p_z| values for interpolation")
        grid = np.full((len(rho_axis), len(z_axis)), np.nan)
        grid[np.searchsorted(rho_axis, p_rho), np.searchsorted(z_axis, p_z)] = n
        if np.isnan(grid).any():
            raise ValueError("samples do not cover a complete rectangular (p_rho, |p_z|) grid")
        with np.errstate(divide="ignore"):
            log_n = np.maximum(np.log(grid), _LOG_FLOOR)
        self.p_rho_max = float(rho_axis[-1])
        self.p_z_max = float(z_axis[-1])
        self._interp = RegularGridInterpolator(
            (rho_axis**2, z_axis**2), log_n, method="cubic", bounds_error=False, fill_value=-math.inf
        )

    @property
    def p_max(self) -> float:
        return min(self.p_rho_max, self.p_z_max)

    def scaled(self, factor: float) -> "TabulatedDistribution":
        out = object.__new__(TabulatedDistribution)
        out.__dict__.update(self.__dict__)
        interp = self._interp
        out._interp = RegularGridInterpolator(
            interp.grid, interp.values + math.log(factor), method="cubic", bounds_error=False, fill_value=-math.inf
        )
        return out

    def __call__(self, p_rho, p_z):
        rho2, z2 = np.broadcast_arrays(np.square(p_rho, dtype=float), np.square(p_z, dtype=float))
        pts = np.stack([rho2.ravel(), z2.ravel()], axis=-1)
        return np.exp(self._interp(pts)).reshape(rho2.shape)

    @classmethod
    def from_csv(cls, path) -> "TabulatedDistribution":
        _, cols = read_csv(path)
        missing = {"p_rho", "p_z", "n"} - cols.keys()
        if missing:
            raise ValueError(f"{path}: missing columns {sorted(missing)}")
        return cls(cols["p_rho"], cols["p_z"], cols["n"])
