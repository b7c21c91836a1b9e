"""CSV serialization for simulated traces and derived tables.

Layout (UTF-8, LF line endings)::

    t_s,mx,my,mperp[,oracle_<name>_mperp ...]
    0.0,0.5,0.0,0.5,...
    ...
    # seed = 101
    # n_realizations = 100000
    # polarization = 1.0
    # config_hash = <sha256 hex>

Floats are written with ``repr`` so every value round-trips bit-exactly;
metadata trails the data as ``# key = value`` comment lines.  The loader
returns the columns and metadata and can rebuild a trace object, checking
that the time column is a uniform grid starting at zero and that the
magnitude column matches ``hypot(mx, my)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .engine import FidTrace, TimeGrid

__all__ = ["CsvFormatError", "TableData", "write_csv", "emit_trace_csv", "load_csv"]

TRACE_COLUMNS = ("t_s", "mx", "my", "mperp")
ORACLE_PREFIX = "oracle_"
ORACLE_SUFFIX = "_mperp"


class CsvFormatError(ValueError):
    """File does not follow the documented CSV layout."""


def _format_value(value: object) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_csv(
    path: str,
    header: Sequence[str],
    columns: Sequence[np.ndarray],
    metadata: Mapping[str, object] | None = None,
) -> None:
    """Write named columns plus trailing metadata comments."""
    if len(header) != len(columns):
        raise ValueError(f"{len(header)} header names but {len(columns)} columns")
    arrays = [np.asarray(column) for column in columns]
    lengths = {array.shape for array in arrays}
    if len(lengths) > 1 or (arrays and arrays[0].ndim != 1):
        raise ValueError(f"columns must be 1-d and equally long, got shapes {sorted(lengths)}")
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(",".join(header) + "\n")
        for row in range(arrays[0].shape[0] if arrays else 0):
            handle.write(",".join(_format_value(array[row]) for array in arrays) + "\n")
        for key, value in (metadata or {}).items():
            handle.write(f"# {key} = {_format_value(value)}\n")


def emit_trace_csv(
    path: str,
    trace: FidTrace,
    oracles: Mapping[str, np.ndarray] | None = None,
    metadata: Mapping[str, object] | None = None,
) -> None:
    """Write a simulated trace with optional reference-magnitude columns.

    Each entry of ``oracles`` maps a short model name (e.g. ``thermal``)
    to a magnitude array on the same grid; it lands in a column called
    ``oracle_<name>_mperp``.
    """
    header = list(TRACE_COLUMNS)
    columns = [trace.grid.points, trace.mx, trace.my, trace.mperp]
    for name, values in (oracles or {}).items():
        values = np.asarray(values, dtype=float)
        if values.shape != trace.mperp.shape:
            raise ValueError(f"oracle column {name!r} has shape {values.shape}, trace has {trace.mperp.shape}")
        header.append(f"{ORACLE_PREFIX}{name}{ORACLE_SUFFIX}")
        columns.append(values)
    merged: dict[str, object] = {
        "seed": trace.seed,
        "n_realizations": trace.n_realizations,
        "polarization": trace.polarization,
    }
    merged.update(metadata or {})
    write_csv(path, header, columns, merged)


@dataclass(frozen=True)
class TableData:
    """Parsed CSV: named columns, metadata, and optional trace rebuild."""

    columns: dict[str, np.ndarray]
    metadata: dict[str, str] = field(default_factory=dict)

    @property
    def oracles(self) -> dict[str, np.ndarray]:
        """Reference-magnitude columns keyed by their short model name."""
        out = {}
        for name, values in self.columns.items():
            if name.startswith(ORACLE_PREFIX) and name.endswith(ORACLE_SUFFIX):
                out[name[len(ORACLE_PREFIX) : -len(ORACLE_SUFFIX)]] = values
        return out

    def trace(self) -> FidTrace:
        """Rebuild the trace object, validating grid and magnitude."""
        missing = [name for name in TRACE_COLUMNS if name not in self.columns]
        if missing:
            raise CsvFormatError(f"not a trace file: missing columns {missing}")
        t = self.columns["t_s"]
        if t.shape[0] < 2:
            raise CsvFormatError("trace needs at least two time samples")
        if t[0] != 0.0:
            raise CsvFormatError(f"time axis must start at 0, got {t[0]!r}")
        grid = TimeGrid(t_max=float(t[-1]), n_points=t.shape[0])
        if not np.allclose(t, grid.points, rtol=0.0, atol=1e-12 * max(1.0, abs(t[-1]))):
            raise CsvFormatError("time axis is not a uniform grid")
        mx, my, mperp = self.columns["mx"], self.columns["my"], self.columns["mperp"]
        if not np.allclose(mperp, np.hypot(mx, my), rtol=0.0, atol=1e-12):
            raise CsvFormatError("mperp column does not match hypot(mx, my)")
        return FidTrace(
            grid=grid,
            mx=mx,
            my=my,
            mperp=mperp,
            n_realizations=int(self.metadata.get("n_realizations", "0") or 0),
            seed=int(self.metadata.get("seed", "0") or 0),
            polarization=float(self.metadata.get("polarization", "1.0")),
        )


def load_csv(path: str) -> TableData:
    """Read a file written by :func:`write_csv` back into columns."""
    with open(path, "r", encoding="utf-8", newline="") as handle:
        lines = handle.read().split("\n")
    if not lines or not lines[0].strip():
        raise CsvFormatError(f"{path}: empty file")
    header = [name.strip() for name in lines[0].split(",")]
    if len(set(header)) != len(header):
        raise CsvFormatError(f"{path}: duplicate column names in header")
    rows: list[list[float]] = []
    metadata: dict[str, str] = {}
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if "=" not in body:
                raise CsvFormatError(f"{path}:{lineno}: metadata line without '='")
            key, _, value = body.partition("=")
            metadata[key.strip()] = value.strip()
            continue
        if metadata:
            raise CsvFormatError(f"{path}:{lineno}: data row after metadata block")
        pieces = line.split(",")
        if len(pieces) != len(header):
            raise CsvFormatError(
                f"{path}:{lineno}: expected {len(header)} fields, got {len(pieces)}"
            )
        try:
            rows.append([float(piece) for piece in pieces])
        except ValueError:
            raise CsvFormatError(f"{path}:{lineno}: non-numeric field") from None
    table = np.asarray(rows, dtype=float).reshape(len(rows), len(header))
    columns = {name: np.ascontiguousarray(table[:, k]) for k, name in enumerate(header)}
    return TableData(columns=columns, metadata=metadata)
