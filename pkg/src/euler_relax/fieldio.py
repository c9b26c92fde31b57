"""Binary/JSON serialization of torus fields and CSV export of 2-D slices.

Binary layout: four little-endian int64 ``(n_t, n_x, n_y, c)`` followed by the
values as row-major little-endian float64. A JSON sidecar next to the binary
file carries the grid metadata.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .errors import FormatError
from .torus import TorusField, TorusGrid

_HEADER = np.dtype("<i8")
_VALUES = np.dtype("<f8")


def sidecar_path(path):
    path = Path(path)
    return path.with_suffix(path.suffix + ".json")


def write_field(path, f: TorusField, extra=None):
    """Write ``f`` to ``path`` and its metadata to ``path + '.json'``."""
    path = Path(path)
    header = np.array(list(f.grid.shape) + [f.components], dtype=_HEADER)
    with open(path, "wb") as fh:
        fh.write(header.tobytes())
        fh.write(np.ascontiguousarray(f.values, dtype=_VALUES).tobytes())
    meta = {"grid": f.grid.to_dict(), "components": f.components, "layout": "t,x,y,c row-major float64 LE"}
    if extra:
        meta.update(extra)
    sidecar_path(path).write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")


def read_field(path, grid: TorusGrid | None = None) -> TorusField:
    """Read a field written by :func:`write_field`.

    The grid comes from ``grid`` if given, else from the sidecar, else from the
    header with ``period_t = 1``.
    """
    path = Path(path)
    raw = path.read_bytes()
    if len(raw) < 4 * _HEADER.itemsize:
        raise FormatError(f"{path}: truncated header")
    dims = np.frombuffer(raw[: 4 * _HEADER.itemsize], dtype=_HEADER)
    if np.any(dims <= 0):
        raise FormatError(f"{path}: invalid header {dims.tolist()}")
    n_t, n_x, n_y, c = (int(v) for v in dims)
    body = raw[4 * _HEADER.itemsize :]
    if len(body) != n_t * n_x * n_y * c * _VALUES.itemsize:
        raise FormatError(f"{path}: payload size does not match header {dims.tolist()}")
    values = np.frombuffer(body, dtype=_VALUES).reshape(n_t, n_x, n_y, c).astype(float)
    if grid is None:
        side = sidecar_path(path)
        period_t = 1.0
        if side.exists():
            meta = json.loads(side.read_text())
            period_t = float(meta.get("grid", {}).get("period_t", 1.0))
        grid = TorusGrid(n_t, n_x, n_y, period_t)
    if grid.shape != (n_t, n_x, n_y):
        raise FormatError(f"{path}: header sizes {dims[:3].tolist()} disagree with grid {grid.shape}")
    return TorusField(grid, values)


def export_slice_csv(path, f: TorusField, t_index=0, names=None):
    """Write the time slice ``t_index`` as CSV rows ``x, y, comp_0, ...``."""
    names = list(names) if names is not None else [f"c{i}" for i in range(f.components)]
    if len(names) != f.components:
        raise FormatError("one column name per component is required")
    _, xs, ys = f.grid.axes()
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["x", "y", *names])
        for i, x in enumerate(xs):
            for j, y in enumerate(ys):
                out.writerow([repr(float(x)), repr(float(y)), *(repr(float(v)) for v in f.values[t_index, i, j])])
