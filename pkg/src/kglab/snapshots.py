"""Binary snapshots of solver states.

Self-describing single-file container: an eight-byte magic with the
format version, a little-endian header carrying the grid geometry and
the time stamp, then named complex128 coefficient arrays in C order.
Coefficients (not point values) are stored so a round trip is exact and
independent of any FFT normalization the reader might assume.
"""

from __future__ import annotations

import struct

import numpy as np

from .grid import Field, Grid, make_grid
from .dynamics import KGState

__all__ = ["save_state", "load_state", "save_fields", "load_fields"]

MAGIC = b"KGSNAP01"
_HEADER = struct.Struct("<IIddI")  # dim, n, box, t, field count


def save_fields(path: str, grid: Grid, t: float, named_fields: dict):
    """Write named coefficient arrays for one grid at one time."""
    with open(path, "wb") as handle:
        handle.write(MAGIC)
        handle.write(_HEADER.pack(grid.d, grid.n, grid.L, t, len(named_fields)))
        for name, f in named_fields.items():
            if not f.grid.compatible(grid):
                raise ValueError(f"field {name!r} lives on a different grid")
            blob = name.encode("utf-8")
            handle.write(struct.pack("<I", len(blob)))
            handle.write(blob)
            coeffs = np.ascontiguousarray(f.coeffs, dtype="<c16")
            handle.write(coeffs.tobytes())


def load_fields(path: str) -> tuple:
    """Read a snapshot; returns (grid, t, dict of name -> Field)."""
    with open(path, "rb") as handle:
        magic = handle.read(len(MAGIC))
        if magic != MAGIC:
            raise ValueError(f"{path}: not a snapshot file (magic {magic!r})")
        d, n, box_l, t, count = _HEADER.unpack(handle.read(_HEADER.size))
        grid = make_grid(d, n, box_l)
        per_field = grid.npoints * 16
        out = {}
        for _ in range(count):
            (name_len,) = struct.unpack("<I", handle.read(4))
            name = handle.read(name_len).decode("utf-8")
            raw = handle.read(per_field)
            if len(raw) != per_field:
                raise ValueError(f"{path}: truncated array for field {name!r}")
            coeffs = np.frombuffer(raw, dtype="<c16").reshape(grid.shape)
            out[name] = Field.from_coeffs(grid, coeffs.astype(np.complex128))
        if handle.read(1):
            raise ValueError(f"{path}: trailing bytes after declared fields")
    return grid, t, out


def save_state(path: str, state: KGState):
    save_fields(path, state.grid, state.t, {"u": state.u, "w": state.w})


def load_state(path: str) -> KGState:
    grid, t, named = load_fields(path)
    if set(named) != {"u", "w"}:
        raise ValueError(f"{path}: expected fields u, w; found {sorted(named)}")
    return KGState(grid=grid, t=t, u=named["u"], w=named["w"])
