"""Binary field snapshots with a JSON metadata sidecar.

Layout: a 24-byte little-endian header ``(L: float64, Ns: int64, Ntheta: int64)``
followed by ``Ns * Ntheta`` complex128 values in row-major ``(Ns, Ntheta)``
order. Metadata goes to ``<path>.json``.
"""
from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .cylinder import CylinderField, CylinderGrid
from .errors import DomainError

HEADER = struct.Struct("<dqq")


def sidecar_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".json")


def write_field(path, field: CylinderField, metadata: dict | None = None) -> None:
    g = field.grid
    path = Path(path)
    with open(path, "wb") as fh:
        fh.write(HEADER.pack(g.L, g.Ns, g.Ntheta))
        fh.write(np.ascontiguousarray(field.values, dtype="<c16").tobytes())
    if metadata is not None:
        sidecar_path(path).write_text(json.dumps(metadata, indent=2, sort_keys=True) + "\n")


def read_field(path, s_scheme: str = "spectral") -> tuple[CylinderField, dict | None]:
    path = Path(path)
    raw = path.read_bytes()
    if len(raw) < HEADER.size:
        raise DomainError(f"{path}: file too short for header")
    L, ns, nt = HEADER.unpack_from(raw)
    body = raw[HEADER.size:]
    if len(body) != 16 * ns * nt:
        raise DomainError(f"{path}: body has {len(body)} bytes, expected {16 * ns * nt}")
    values = np.frombuffer(body, dtype="<c16").reshape(ns, nt).astype(complex)
    field = CylinderField(values, CylinderGrid(L, ns, nt, s_scheme))
    side = sidecar_path(path)
    meta = json.loads(side.read_text()) if side.exists() else None
    return field, meta
