"""Array dumps and CSV emitters.

Dump format: one JSON header line (UTF-8, terminated by ``\\n``) with keys
``shape``, ``dx``, ``m``, ``hbar``, ``c`` and ``ordering`` (always
``"standard-fft"``), followed by the array as little-endian float64
(re, im) pairs in C order.

CSV format: a first metadata line ``# generated: <UTC timestamp>``, then a
header row of ``name [unit]`` cells, then data rows with floats written as
``%.17g`` so identical inputs give identical bytes.
"""

from __future__ import annotations

import csv
import datetime as _dt
import json
from pathlib import Path

import numpy as np

from .lattice import MomentumLattice

__all__ = ["write_dump", "read_dump", "write_csv", "read_csv", "density_slice_rows", "fmt"]


def write_dump(path, array: np.ndarray, lattice: MomentumLattice) -> Path:
    path = Path(path)
    a = np.ascontiguousarray(array, dtype="<c16")
    u = lattice.units
    header = {"shape": list(a.shape), "dx": lattice.dx, "m": u.mass, "hbar": u.hbar,
              "c": u.c, "ordering": "standard-fft"}
    with open(path, "wb") as fh:
        fh.write((json.dumps(header, sort_keys=True) + "\n").encode())
        fh.write(a.tobytes())
    return path


def read_dump(path):
    """Return (header dict, complex array)."""
    with open(path, "rb") as fh:
        header = json.loads(fh.readline().decode())
        data = np.frombuffer(fh.read(), dtype="<c16")
    if header.get("ordering") != "standard-fft":
        raise ValueError(f"unsupported ordering {header.get('ordering')!r}")
    return header, data.reshape(header["shape"]).copy()


def fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "%.17g" % float(v)
    return str(v)


def write_csv(path, columns, rows, timestamp: str | None = None) -> Path:
    """Write ``rows`` under a ``name [unit]`` header.

    Parameters
    ----------
    columns : sequence of (name, unit)
    rows : iterable of sequences, one value per column
    timestamp : str, optional
        Metadata stamp; defaults to the current UTC time.  This line is the
        only part of the file that may differ between identical runs.
    """
    path = Path(path)
    ts = timestamp or _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    with open(path, "w", newline="") as fh:
        fh.write(f"# generated: {ts}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([f"{n} [{u}]" for n, u in columns])
        for row in rows:
            if len(row) != len(columns):
                raise ValueError(f"row has {len(row)} values, expected {len(columns)}")
            w.writerow([fmt(v) for v in row])
    return path


def read_csv(path):
    """Return (metadata line, header list, list of string rows)."""
    with open(path, newline="") as fh:
        meta = fh.readline().rstrip("\n")
        rd = csv.reader(fh)
        header = next(rd)
        return meta, header, list(rd)


def density_slice_rows(lattice: MomentumLattice, density: np.ndarray, z_index: int = 0):
    """Rows (x, y, z, eps, p) of a (2, n, n, n) density on the plane z = z_index."""
    xs = lattice.x_axis
    z = xs[z_index]
    order = np.argsort(xs)
    for ie, eps in enumerate((1, -1)):
        for i in order:
            for j in order:
                yield (xs[i], xs[j], z, eps, density[ie, i, j, z_index])
