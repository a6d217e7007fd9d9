"""Reading and writing the JSON/CSV artifacts shared by the CLI and plotting."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import MismatchError, ParseError
from .netlist import Design, Netlist


def write_json(path, data) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(data, indent=1) + "\n")


def write_text(path, text: str) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def read_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno}: {exc.msg}") from None


def placement_dict(netlist: Netlist, positions) -> dict:
    return {"cells": [{"name": c.name, "x": float(positions[c.id, 0]), "y": float(positions[c.id, 1])}
                      for c in netlist.cells]}


def positions_from_dict(data: dict, design: Design) -> np.ndarray:
    """Cell positions from a ``{cells: [{name, x, y}]}`` record.

    Cells missing from the record keep their design positions.
    """
    xy = np.array(design.positions, dtype=float)
    index = design.netlist.cell_index
    try:
        rows = data["cells"]
        for row in rows:
            name = row["name"]
            if name not in index:
                raise MismatchError(f"placement names unknown cell {name!r}")
            xy[index[name]] = (float(row["x"]), float(row["y"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed placement record: {exc}") from None
    return xy


def load_placement(path, design: Design) -> np.ndarray:
    return positions_from_dict(read_json(path), design)


def paths_from_dict(data: dict, netlist: Netlist) -> list:
    """``[(slack, [pin ids])]`` from a ``paths.json`` record."""
    index = netlist.pin_index
    out = []
    for row in data.get("paths", []):
        pins = []
        for name in row["pins"]:
            if name not in index:
                raise MismatchError(f"path names unknown pin {name!r}")
            pins.append(index[name])
        out.append((row.get("slack"), pins))
    return out
